#include <chrono>
#include <cmath>
#include <semaphore>
#include <thread>

#include <httplib.h>

#include "crossflow/backend.hpp"
#include "crossflow/json_io.hpp"

namespace crossflow {

namespace {

constexpr char kCompletionsPath[] = "/v1/chat/completions";

bool is_retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

struct HttpBackend::Inflight {
    explicit Inflight(int limit) : sem(limit) {}
    std::counting_semaphore<1 << 20> sem;
};

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw ConfigError("http backend: base_url must be set");
    }
    if (config_.max_inflight < 1) {
        throw ConfigError("http backend: max_inflight must be at least 1");
    }
    if (config_.retries < 0) {
        throw ConfigError("http backend: retries must be non-negative");
    }
    inflight_ = std::make_unique<Inflight>(config_.max_inflight);
}

HttpBackend::~HttpBackend() = default;

CompletionResult HttpBackend::complete(const CompletionRequest& req) {
    if (req.prompt.empty()) {
        throw UsageError("completion prompt must not be empty");
    }

    json body;
    body["model"] = req.model_id.empty() ? config_.model_id : req.model_id;
    body["messages"] = json::array({json{{"role", "user"}, {"content", req.prompt}}});
    body["temperature"] = req.temperature;
    body["max_tokens"] = req.max_output_tokens;
    const std::string payload = body.dump();

    inflight_->sem.acquire();
    struct Release {
        std::counting_semaphore<1 << 20>& sem;
        ~Release() { sem.release(); }
    } release{inflight_->sem};

    const auto started = std::chrono::steady_clock::now();
    auto elapsed_seconds = [&started] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) {
            const double backoff = config_.backoff_s * std::pow(2.0, attempt - 1);
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
        }

        httplib::Client client(config_.base_url);
        client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
        client.set_write_timeout(std::chrono::duration<double>(config_.timeout_s));
        if (!config_.api_key.empty()) {
            client.set_bearer_token_auth(config_.api_key);
        }

        httplib::Result res = client.Post(kCompletionsPath, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;  // retryable
        }
        if (res->status < 200 || res->status >= 300) {
            const std::string message = "http backend: status " + std::to_string(res->status) +
                                        " from " + config_.base_url + kCompletionsPath;
            if (is_retryable_status(res->status)) {
                last_error = message;
                continue;
            }
            throw BackendError(message, /*retryable=*/false);
        }

        json parsed;
        try {
            parsed = json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw BackendError(std::string("http backend: malformed response body: ") + e.what(),
                               /*retryable=*/false);
        }

        std::string text;
        try {
            text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw BackendError(std::string("http backend: response missing choices[0].message.content: ") +
                                   e.what(),
                               /*retryable=*/false);
        }
        if (text.empty()) {
            throw BackendError("http backend: provider returned an empty completion",
                               /*retryable=*/false);
        }

        CompletionResult result;
        result.text = std::move(text);
        if (parsed.contains("usage") && parsed["usage"].is_object() &&
            parsed["usage"].contains("prompt_tokens") &&
            parsed["usage"].contains("completion_tokens") &&
            parsed["usage"]["prompt_tokens"].is_number_integer() &&
            parsed["usage"]["completion_tokens"].is_number_integer()) {
            result.prompt_tokens = parsed["usage"]["prompt_tokens"].get<long>();
            result.completion_tokens = parsed["usage"]["completion_tokens"].get<long>();
            result.tokens_estimated = false;
        } else {
            result.prompt_tokens = count_whitespace_tokens(req.prompt);
            result.completion_tokens = count_whitespace_tokens(result.text);
            result.tokens_estimated = true;
        }
        result.elapsed_s = std::max(elapsed_seconds(), 1e-9);
        return result;
    }

    throw BackendError("http backend: giving up after " + std::to_string(config_.retries + 1) +
                           " attempts; last error: " + last_error,
                       /*retryable=*/true);
}

}  // namespace crossflow
