#include "crossflow/http_embedder.hpp"

#include <cmath>

#include <httplib.h>

#include "crossflow/errors.hpp"
#include "crossflow/json_io.hpp"

namespace crossflow {

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw ConfigError("http embedder: base_url must be set");
    }
    if (config_.dim < 2) {
        throw ConfigError("http embedder: dim must be at least 2");
    }
}

Embedding HttpEmbedder::embed(const std::string& text) const {
    if (text.empty()) {
        return Embedding(config_.dim, 0.0);
    }

    json body;
    body["model"] = config_.model_id;
    body["input"] = text;

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
    client.set_write_timeout(std::chrono::duration<double>(config_.timeout_s));
    if (!config_.api_key.empty()) {
        client.set_bearer_token_auth(config_.api_key);
    }

    httplib::Result res = client.Post("/v1/embeddings", body.dump(), "application/json");
    if (!res) {
        throw BackendError("http embedder: transport failure: " + httplib::to_string(res.error()),
                           /*retryable=*/true);
    }
    if (res->status < 200 || res->status >= 300) {
        throw BackendError("http embedder: status " + std::to_string(res->status),
                           res->status == 429 || res->status >= 500);
    }

    json parsed;
    try {
        parsed = json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw BackendError(std::string("http embedder: malformed response: ") + e.what(),
                           /*retryable=*/false);
    }

    Embedding vec;
    try {
        const json& values = parsed.at("data").at(0).at("embedding");
        vec.reserve(values.size());
        for (const auto& v : values) vec.push_back(v.get<double>());
    } catch (const json::exception& e) {
        throw BackendError(std::string("http embedder: response missing data[0].embedding: ") +
                               e.what(),
                           /*retryable=*/false);
    }
    if (vec.size() != config_.dim) {
        throw BackendError("http embedder: provider returned dimension " +
                               std::to_string(vec.size()) + ", expected " +
                               std::to_string(config_.dim),
                           /*retryable=*/false);
    }

    double norm_sq = 0.0;
    for (double x : vec) norm_sq += x * x;
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (double& x : vec) x *= inv;
    }
    return vec;
}

}  // namespace crossflow
