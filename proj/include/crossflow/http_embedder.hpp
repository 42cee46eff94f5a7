#pragma once

#include <string>

#include "crossflow/embedding.hpp"

namespace crossflow {

struct HttpEmbedderConfig {
    std::string base_url;  ///< scheme + host[:port], no trailing path
    std::string model_id;
    std::size_t dim = 256;  ///< expected vector length, validated per response
    double timeout_s = 60.0;
    std::string api_key;
};

/// OpenAI-compatible embeddings client: POST <base_url>/v1/embeddings.
/// Responses are L2-normalized so downstream code sees unit vectors; empty
/// text short-circuits to the zero vector without a network call.
class HttpEmbedder final : public Embedder {
public:
    explicit HttpEmbedder(HttpEmbedderConfig config);

    Embedding embed(const std::string& text) const override;
    std::size_t dim() const override { return config_.dim; }

private:
    HttpEmbedderConfig config_;
};

}  // namespace crossflow
