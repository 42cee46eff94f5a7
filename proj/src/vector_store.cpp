#include "crossflow/vector_store.hpp"

#include <algorithm>
#include <fstream>

#include "crossflow/errors.hpp"
#include "crossflow/json_io.hpp"

namespace crossflow {

void VectorStore::insert(std::string chunk_id, std::string text, Embedding vec) {
    if (vec.empty()) {
        throw UsageError("vector store: cannot insert an empty vector");
    }
    if (dim_ == 0) {
        dim_ = vec.size();
    } else if (vec.size() != dim_) {
        throw UsageError("vector store: dimension mismatch (store " + std::to_string(dim_) +
                         ", vector " + std::to_string(vec.size()) + ")");
    }
    entries_[std::move(chunk_id)] = Entry{std::move(text), std::move(vec)};
}

void VectorStore::insert(const Chunk& chunk, Embedding vec) {
    insert(chunk.chunk_id, chunk.text, std::move(vec));
}

std::vector<RetrievalHit> VectorStore::top_k(std::span<const double> query,
                                             std::size_t k) const {
    if (entries_.empty() || k == 0) return {};
    if (query.size() != dim_) {
        throw UsageError("vector store: query dimension " + std::to_string(query.size()) +
                         " does not match store dimension " + std::to_string(dim_));
    }

    std::vector<RetrievalHit> hits;
    hits.reserve(entries_.size());
    for (const auto& [id, entry] : entries_) {
        hits.push_back(RetrievalHit{id, cosine(query, entry.vec), entry.text});
    }
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

void VectorStore::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write index file: " + path.string());
    }
    for (const auto& [id, entry] : entries_) {
        json record;
        record["chunk_id"] = id;
        record["text"] = entry.text;
        record["vector"] = entry.vec;
        out << record.dump() << '\n';
    }
    out.flush();
    if (!out) {
        throw IoError("failed writing index file: " + path.string());
    }
}

VectorStore VectorStore::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open index file: " + path.string());
    }

    VectorStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json record = parse_json_line(line, path, lineno);
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (!record.is_object() || !record.contains("chunk_id") || !record.contains("text") ||
            !record.contains("vector")) {
            throw IoError(where + ": index record must have chunk_id, text and vector fields");
        }
        if (record.size() != 3) {
            throw IoError(where + ": index record carries unexpected fields");
        }
        if (!record["chunk_id"].is_string() || !record["text"].is_string() ||
            !record["vector"].is_array()) {
            throw IoError(where + ": malformed index record field types");
        }
        Embedding vec;
        vec.reserve(record["vector"].size());
        for (const auto& component : record["vector"]) {
            if (!component.is_number()) {
                throw IoError(where + ": vector components must be numbers");
            }
            vec.push_back(component.get<double>());
        }
        if (vec.empty()) {
            throw IoError(where + ": empty vector");
        }
        if (store.dim_ != 0 && vec.size() != store.dim_) {
            throw IoError(where + ": vector dimension " + std::to_string(vec.size()) +
                          " disagrees with earlier records (" + std::to_string(store.dim_) + ")");
        }
        store.insert(record["chunk_id"].get<std::string>(), record["text"].get<std::string>(),
                     std::move(vec));
    }
    return store;
}

}  // namespace crossflow
