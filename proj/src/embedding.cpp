#include "crossflow/embedding.hpp"

#include <cmath>

#include "crossflow/corpus.hpp"
#include "crossflow/errors.hpp"

namespace crossflow {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw UsageError("cosine: dimension mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

Embedding hash_embed(std::string_view text, std::size_t dim) {
    if (dim < 2) {
        throw UsageError("hash_embed: dimension must be at least 2, got " + std::to_string(dim));
    }
    Embedding v(dim, 0.0);
    const std::vector<std::string> tokens = tokenize(text);
    if (tokens.empty()) return v;

    for (unsigned salt = 0; salt < 64; ++salt) {
        std::fill(v.begin(), v.end(), 0.0);
        double norm_sq = 0.0;
        for (const std::string& token : tokens) {
            std::uint64_t h = fnv1a64(token);
            if (salt != 0) {
                // Signed counts cancelled on the previous pass; perturb the hash.
                h = fnv1a64(token) ^ (0x9e3779b97f4a7c15ULL * salt);
            }
            const std::size_t bucket = static_cast<std::size_t>(h % dim);
            const double sign = (h >> 63) ? -1.0 : 1.0;
            v[bucket] += sign;
        }
        norm_sq = 0.0;
        for (double x : v) norm_sq += x * x;
        if (norm_sq > 0.0) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (double& x : v) x *= inv;
            return v;
        }
    }
    // Unreachable in practice: 64 salted passes all cancelled exactly.
    v[fnv1a64(tokens.front()) % dim] = 1.0;
    return v;
}

}  // namespace crossflow
