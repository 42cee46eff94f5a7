#include "crossflow/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "crossflow/errors.hpp"

namespace crossflow {

namespace {

bool is_token_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char to_lower_ascii(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_token_byte(c)) {
            current.push_back(to_lower_ascii(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

std::vector<Chunk> chunk_document(const Document& doc, std::size_t chunk_size,
                                  std::size_t overlap) {
    if (chunk_size == 0 || overlap >= chunk_size) {
        throw ConfigError("invalid chunking parameters: chunk_size=" +
                          std::to_string(chunk_size) + ", overlap=" + std::to_string(overlap) +
                          " (need 0 <= overlap < chunk_size)");
    }
    const std::vector<std::string> tokens = tokenize(doc.text);
    const std::size_t n = tokens.size();
    if (n == 0) return {};

    const std::size_t stride = chunk_size - overlap;
    // count = max(1, ceil((n - overlap) / stride)); windows past a covered tail are dropped.
    std::size_t count = 1;
    if (n > overlap) {
        count = std::max<std::size_t>(1, (n - overlap + stride - 1) / stride);
    }

    std::vector<Chunk> chunks;
    chunks.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t begin = i * stride;
        const std::size_t end = std::min(begin + chunk_size, n);
        Chunk c;
        c.chunk_id = doc.doc_id + "#" + std::to_string(i);
        c.doc_id = doc.doc_id;
        c.span = {begin, end};
        c.text = join_tokens(std::span(tokens).subspan(begin, end - begin));
        chunks.push_back(std::move(c));
    }
    return chunks;
}

std::vector<Document> load_corpus(const std::filesystem::path& dir,
                                  const std::string& domain) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw IoError("corpus directory not found: " + dir.string());
    }

    std::vector<Document> docs;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        std::error_code ec;
        if (entry.is_directory(ec)) continue;
        if (!entry.is_regular_file(ec) && !entry.is_symlink(ec)) continue;

        std::ifstream in(entry.path(), std::ios::binary);
        if (!in) {
            throw IoError("cannot read corpus file: " + entry.path().string());
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        if (in.bad()) {
            throw IoError("cannot read corpus file: " + entry.path().string());
        }

        Document doc;
        doc.doc_id = fs::relative(entry.path(), dir).generic_string();
        doc.domain = domain;
        doc.text = std::move(buf).str();
        docs.push_back(std::move(doc));
    }

    std::sort(docs.begin(), docs.end(),
              [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
    return docs;
}

}  // namespace crossflow
