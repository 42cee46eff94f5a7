#include "crossflow/backend.hpp"

#include <algorithm>

#include "crossflow/json_io.hpp"

namespace crossflow {

namespace {

bool is_space_byte(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string_view> whitespace_tokens(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space_byte(text[i])) ++i;
        const std::size_t begin = i;
        while (i < text.size() && !is_space_byte(text[i])) ++i;
        if (i > begin) tokens.push_back(text.substr(begin, i - begin));
    }
    return tokens;
}

constexpr double kMinElapsedSeconds = 1e-6;

}  // namespace

long count_whitespace_tokens(std::string_view text) {
    return static_cast<long>(whitespace_tokens(text).size());
}

void MockBackend::add_entry(const std::string& key, std::vector<std::string> steps,
                            double delay_ms) {
    if (steps.empty()) {
        throw UsageError("mock backend: entry '" + key + "' needs at least one step");
    }
    entries_[key] = Entry{std::move(steps), delay_ms};
}

CompletionResult MockBackend::complete(const CompletionRequest& req) {
    if (req.prompt.empty()) {
        throw UsageError("completion prompt must not be empty");
    }

    const Entry* entry = nullptr;
    for (const std::string& key : req.scripted_keys) {
        auto it = entries_.find(key);
        if (it != entries_.end()) {
            entry = &it->second;
            break;
        }
    }

    std::string text;
    double delay_ms = 0.0;
    if (entry != nullptr) {
        const std::size_t last = entry->steps.size() - 1;
        const std::size_t idx =
            std::min<std::size_t>(std::max(req.step_index, 0), last);
        text = entry->steps[idx];
        delay_ms = entry->delay_ms;
    } else {
        const auto tokens = whitespace_tokens(req.prompt);
        std::string echoed;
        const std::size_t n = std::min<std::size_t>(tokens.size(), 8);
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) echoed += ' ';
            echoed += tokens[i];
        }
        text = "MOCK(" + echoed + ")";
    }

    if (text.empty()) {
        throw BackendError("mock backend: scripted empty response", /*retryable=*/false);
    }

    CompletionResult result;
    result.text = std::move(text);
    result.prompt_tokens = count_whitespace_tokens(req.prompt);
    result.completion_tokens = count_whitespace_tokens(result.text);
    result.elapsed_s = (latency_.base_ms + latency_.per_prompt_token_ms * result.prompt_tokens +
                        latency_.per_completion_token_ms * result.completion_tokens + delay_ms) /
                       1000.0;
    result.elapsed_s = std::max(result.elapsed_s, kMinElapsedSeconds);
    return result;
}

namespace {

MockLatency parse_latency(const json& j, const std::string& context) {
    StrictObject obj(j, context);
    MockLatency latency;
    if (const json* v = obj.get("base_ms")) latency.base_ms = as_number(*v, context + ".base_ms");
    if (const json* v = obj.get("per_prompt_token_ms")) {
        latency.per_prompt_token_ms = as_number(*v, context + ".per_prompt_token_ms");
    }
    if (const json* v = obj.get("per_completion_token_ms")) {
        latency.per_completion_token_ms = as_number(*v, context + ".per_completion_token_ms");
    }
    obj.reject_unknown_keys();
    if (latency.base_ms < 0 || latency.per_prompt_token_ms < 0 ||
        latency.per_completion_token_ms < 0) {
        throw ConfigError(context + ": latency values must be non-negative");
    }
    return latency;
}

void parse_entry(MockBackend& backend, const json& j, const std::string& context) {
    StrictObject obj(j, context);
    const std::string key = as_string(obj.require("key"), context + ".key");
    if (key.empty()) {
        throw ConfigError(context + ": key must be non-empty");
    }

    std::vector<std::string> steps;
    const json* text = obj.get("text");
    const json* steps_json = obj.get("steps");
    if ((text != nullptr) == (steps_json != nullptr)) {
        throw ConfigError(context + ": entry '" + key + "' needs exactly one of text | steps");
    }
    if (text != nullptr) {
        steps.push_back(as_string(*text, context + ".text"));
    } else {
        if (!steps_json->is_array() || steps_json->empty()) {
            throw ConfigError(context + ": steps must be a non-empty array of strings");
        }
        for (const auto& step : *steps_json) {
            steps.push_back(as_string(step, context + ".steps[]"));
        }
    }

    double delay_ms = 0.0;
    if (const json* v = obj.get("delay_ms")) {
        delay_ms = as_number(*v, context + ".delay_ms");
        if (delay_ms < 0) throw ConfigError(context + ": delay_ms must be non-negative");
    }
    obj.reject_unknown_keys();
    backend.add_entry(key, std::move(steps), delay_ms);
}

}  // namespace

MockBackend MockBackend::from_fixture(const std::filesystem::path& path) {
    const json doc = parse_json_file(path);
    MockBackend backend;

    const json* entries = nullptr;
    if (doc.is_array()) {
        entries = &doc;
    } else if (doc.is_object()) {
        StrictObject obj(doc, path.string());
        if (const json* latency = obj.get("latency")) {
            backend.set_latency(parse_latency(*latency, path.string() + ": latency"));
        }
        entries = &obj.require("entries");
        obj.reject_unknown_keys();
        if (!entries->is_array()) {
            throw ConfigError(path.string() + ": entries must be an array");
        }
    } else {
        throw ConfigError(path.string() + ": fixture must be a JSON array or object");
    }

    std::size_t index = 0;
    for (const auto& record : *entries) {
        parse_entry(backend, record, path.string() + ": entry " + std::to_string(index));
        ++index;
    }
    return backend;
}

}  // namespace crossflow
