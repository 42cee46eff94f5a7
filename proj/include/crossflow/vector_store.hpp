#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crossflow/corpus.hpp"
#include "crossflow/embedding.hpp"

namespace crossflow {

/// One scored result from a store query.
struct RetrievalHit {
    std::string chunk_id;
    double score = 0.0;  ///< cosine similarity in [-1, 1]
    std::string text;
};

/// Exact in-memory vector index: every query is an exhaustive cosine scan,
/// sorted by (score desc, chunk_id asc). Supports concurrent readers once
/// populated; insertions require exclusive access.
class VectorStore {
public:
    VectorStore() = default;

    /// dim 0 means "adopt the dimension of the first inserted vector".
    explicit VectorStore(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Inserts or replaces the entry for chunk_id. Throws UsageError when the
    /// vector's dimension does not match the store's.
    void insert(std::string chunk_id, std::string text, Embedding vec);
    void insert(const Chunk& chunk, Embedding vec);

    /// Exactly min(k, size) hits, identical to a brute-force scan sorted by
    /// (score desc, chunk_id asc). An empty store yields an empty list.
    std::vector<RetrievalHit> top_k(std::span<const double> query, std::size_t k) const;

    /// Writes one JSON record per line with fields chunk_id, text, vector,
    /// ordered by chunk_id. Vector components round-trip exactly.
    void save(const std::filesystem::path& path) const;

    /// Rebuilds a store from `save` output. A zero-length file loads as an
    /// empty store; any malformed line raises IoError with its line number and
    /// no partial store is produced.
    static VectorStore load(const std::filesystem::path& path);

private:
    struct Entry {
        std::string text;
        Embedding vec;
    };

    std::size_t dim_ = 0;
    std::map<std::string, Entry> entries_;
};

}  // namespace crossflow
