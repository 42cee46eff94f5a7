#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "crossflow/errors.hpp"

namespace crossflow {

/// One completion call. The scripted_* fields are lookup metadata for the mock
/// backend (set by the orchestrator, ignored by live backends).
struct CompletionRequest {
    std::string prompt;  ///< must be non-empty
    std::string model_id;
    double temperature = 0.0;
    int max_output_tokens = 1024;

    std::vector<std::string> scripted_keys;  ///< tried in order, most specific first
    int step_index = 0;                      ///< 0-based position within a scripted run
};

struct CompletionResult {
    std::string text;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    double elapsed_s = 0.0;         ///< time attributed to the completion call, > 0
    bool tokens_estimated = false;  ///< true when counts were not provider-reported
};

/// Number of maximal non-whitespace runs in `text`.
long count_whitespace_tokens(std::string_view text);

/// Completion provider interface; implementations are safe for concurrent calls.
class Backend {
public:
    virtual ~Backend() = default;

    /// Returns a non-empty completion or throws BackendError.
    virtual CompletionResult complete(const CompletionRequest& req) = 0;

    /// Token count by this backend's own counting rule (whitespace tokens).
    virtual long count_tokens(std::string_view text) const {
        return count_whitespace_tokens(text);
    }

    virtual std::string name() const = 0;
};

/// Deterministic timing model for the mock: elapsed seconds are computed from
/// token counts and per-entry delays instead of measured, so repeated runs
/// report identical durations.
struct MockLatency {
    double base_ms = 0.0;
    double per_prompt_token_ms = 0.0;
    double per_completion_token_ms = 0.0;
};

/// Scripted completion provider for offline, reproducible runs. Responses are
/// a pure function of (fixture, scripted key, step index): the first matching
/// key wins, its step list is indexed by step_index (clamped to the last step),
/// and requests matching no entry echo "MOCK(<first 8 prompt tokens>)".
class MockBackend final : public Backend {
public:
    MockBackend() = default;

    /// Loads a fixture file: either a JSON array of entry records or an object
    /// {"latency": {...}, "entries": [...]}. Each entry is {"key", "text" |
    /// "steps", "delay_ms"?}. Malformed files raise errors with line context.
    static MockBackend from_fixture(const std::filesystem::path& path);

    void add_entry(const std::string& key, std::vector<std::string> steps, double delay_ms = 0.0);
    void set_latency(const MockLatency& latency) { latency_ = latency; }

    CompletionResult complete(const CompletionRequest& req) override;
    std::string name() const override { return "mock"; }

    std::size_t entry_count() const { return entries_.size(); }

private:
    struct Entry {
        std::vector<std::string> steps;
        double delay_ms = 0.0;
    };

    std::map<std::string, Entry> entries_;
    MockLatency latency_;
};

struct HttpBackendConfig {
    std::string base_url;  ///< scheme + host[:port], no trailing path
    std::string model_id;
    double timeout_s = 60.0;
    int max_inflight = 4;
    int retries = 2;
    double backoff_s = 0.25;  ///< doubled after every retryable failure
    std::string api_key;      ///< sent as a bearer token when non-empty
};

/// OpenAI-compatible chat-completions client: POST <base_url>/v1/chat/completions.
/// Retries retryable failures (transport errors, timeouts, 429, 5xx) with
/// exponential backoff, never exceeding 1 + retries attempts, and bounds
/// concurrent in-flight requests by max_inflight.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    ~HttpBackend();

    CompletionResult complete(const CompletionRequest& req) override;
    std::string name() const override { return "http"; }

private:
    struct Inflight;

    HttpBackendConfig config_;
    std::unique_ptr<Inflight> inflight_;
};

}  // namespace crossflow
