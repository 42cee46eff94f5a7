#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crossflow {

/// One ingested source file. An empty text is legal and yields zero chunks.
struct Document {
    std::string doc_id;  ///< relative path within the corpus directory, unique per corpus
    std::string domain;
    std::string text;
};

/// Half-open token offsets [begin, end) into the owning document's token stream.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// A contiguous token window of a document; the unit of indexing and retrieval.
struct Chunk {
    std::string chunk_id;  ///< "<doc_id>#<index>", index strictly increasing per document
    std::string doc_id;
    TokenSpan span;
    std::string text;  ///< window tokens joined by single spaces
};

/// Lowercases and splits on maximal runs of non-alphanumeric bytes. Tokens are
/// ASCII [a-z0-9]+ runs; every other byte (including UTF-8 continuation bytes)
/// acts as a separator. Never produces empty tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Joins tokens with single spaces.
std::string join_tokens(std::span<const std::string> tokens);

/// Slices a document into overlapping token windows. Windows start at multiples
/// of (chunk_size - overlap); every window except possibly the last holds exactly
/// chunk_size tokens; once the tail is covered no further window is emitted.
/// Requires 0 <= overlap < chunk_size, else ConfigError.
std::vector<Chunk> chunk_document(const Document& doc, std::size_t chunk_size,
                                  std::size_t overlap);

/// Reads every regular file (and symlink target) under `dir`, recursively.
/// doc_id is the file's path relative to `dir` with '/' separators; the result
/// is sorted by doc_id. An unreadable file raises IoError naming it.
std::vector<Document> load_corpus(const std::filesystem::path& dir,
                                  const std::string& domain);

}  // namespace crossflow
