#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crossflow {

/// Dense vector representation of a text. Unit L2 norm for non-empty source
/// text; the all-zero vector stands for empty text.
using Embedding = std::vector<double>;

/// FNV-1a 64-bit hash; stable across platforms and process restarts.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Cosine of the angle between two vectors: dot(a,b) / (|a| * |b|).
/// Returns 0 when either norm is zero. Throws UsageError on dimension mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

/// Deterministic feature-hashing embedder. Each token lands in bucket
/// (fnv1a64(token) mod dim) with sign taken from hash bit 63; signed counts are
/// accumulated and L2-normalized. An empty token list yields the zero vector.
/// In the rare case where signed counts cancel to an all-zero vector, the
/// accumulation is repeated with a salted hash so non-empty text always embeds
/// to a unit vector. Requires dim >= 2.
Embedding hash_embed(std::string_view text, std::size_t dim);

/// Text-to-vector interface; implementations must be safe for concurrent use.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual Embedding embed(const std::string& text) const = 0;
    virtual std::size_t dim() const = 0;
};

/// Offline default embedder backed by hash_embed.
class HashEmbedder final : public Embedder {
public:
    explicit HashEmbedder(std::size_t dim) : dim_(dim) {}

    Embedding embed(const std::string& text) const override { return hash_embed(text, dim_); }
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
};

}  // namespace crossflow
