#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "crossflow/backend.hpp"
#include "crossflow/rag.hpp"

namespace testutil {

namespace fs = std::filesystem;

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        const auto unique = std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1));
        path_ = fs::temp_directory_path() / ("crossflow_test_" + unique);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

/// Decorator that records every request passed through to the wrapped backend.
class RecordingBackend final : public crossflow::Backend {
public:
    explicit RecordingBackend(crossflow::Backend& inner) : inner_(inner) {}

    crossflow::CompletionResult complete(const crossflow::CompletionRequest& req) override {
        {
            std::lock_guard<std::mutex> lock(mu_);
            requests_.push_back(req);
        }
        return inner_.complete(req);
    }

    std::string name() const override { return inner_.name(); }

    std::vector<crossflow::CompletionRequest> requests() const {
        std::lock_guard<std::mutex> lock(mu_);
        return requests_;
    }

    /// Prompts of requests whose first scripted key starts with `key_prefix`.
    std::vector<std::string> prompts_for_key_prefix(const std::string& key_prefix) const {
        std::lock_guard<std::mutex> lock(mu_);
        std::vector<std::string> prompts;
        for (const auto& req : requests_) {
            if (!req.scripted_keys.empty() && req.scripted_keys.front().starts_with(key_prefix)) {
                prompts.push_back(req.prompt);
            }
        }
        return prompts;
    }

private:
    crossflow::Backend& inner_;
    mutable std::mutex mu_;
    std::vector<crossflow::CompletionRequest> requests_;
};

/// Fallback stub that counts invocations and serves a fixed snippet list.
class CountingFallback final : public crossflow::FallbackProvider {
public:
    explicit CountingFallback(std::vector<std::string> snippets = {})
        : snippets_(std::move(snippets)) {}

    std::vector<std::string> fetch(const std::string&) override {
        ++calls_;
        return snippets_;
    }

    int calls() const { return calls_.load(); }

private:
    std::vector<std::string> snippets_;
    std::atomic<int> calls_{0};
};

/// Fallback stub that always throws.
class ThrowingFallback final : public crossflow::FallbackProvider {
public:
    std::vector<std::string> fetch(const std::string&) override {
        throw std::runtime_error("fallback exploded");
    }
};

inline std::string random_token(std::mt19937& rng, int max_len = 8) {
    std::uniform_int_distribution<int> len_dist(1, max_len);
    std::uniform_int_distribution<int> char_dist(0, 35);
    const int len = len_dist(rng);
    std::string token;
    for (int i = 0; i < len; ++i) {
        const int c = char_dist(rng);
        token.push_back(c < 26 ? static_cast<char>('a' + c) : static_cast<char>('0' + (c - 26)));
    }
    return token;
}

}  // namespace testutil
