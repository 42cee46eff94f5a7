#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "crossflow/agents.hpp"

namespace crossflow {

struct EmbeddingConfig {
    std::string kind = "hash";  ///< hash | http
    std::size_t dim = 256;
    std::string base_url;  ///< http kind only
    std::string model_id;
    double timeout_s = 60.0;
};

struct RetrievalConfig {
    std::size_t k = 5;
};

struct RagConfig {
    double tau_hi = 0.75;
    double tau_lo = 0.40;
    std::string fallback = "none";  ///< none | fixture:<path>
};

struct BackendSettings {
    std::string kind = "mock";  ///< mock | http
    std::filesystem::path fixture;
    std::string base_url;
    std::string model_id;
    double timeout_s = 60.0;
    int max_inflight = 4;
    int retries = 2;
    double backoff_s = 0.25;
};

/// A custom flow entry: context policy and knowledge applied to the roster
/// (optionally a named subset of it).
struct CustomFlowConfig {
    std::string flow_id;
    ContextPolicy context_policy = ContextPolicy::FullHistory;
    KnowledgeKind knowledge = KnowledgeKind::None;
    std::string retrieval_pathway;
    std::vector<std::string> agent_ids;  ///< empty means the whole roster
};

struct FlowSelection {
    std::vector<std::string> presets;  ///< subset of {"1","2","3","4"}
    std::vector<CustomFlowConfig> custom;
};

/// The whole experiment: corpora, roster, flows, question set, and every
/// module's settings. Loaded from a strict JSON file that rejects unknown keys
/// and verifies that referenced paths exist.
struct ExperimentConfig {
    std::filesystem::path corpora_root;
    std::filesystem::path questions;
    std::filesystem::path output_dir = "out";
    std::size_t chunk_size = 512;
    std::size_t chunk_overlap = 64;
    EmbeddingConfig embedding;
    RetrievalConfig retrieval;
    RagConfig rag;
    BackendSettings backend;
    std::vector<AgentSpec> roster;
    FlowSelection flows;
    int parallelism = 1;
    std::uint64_t seed = 0;  ///< reserved; deterministic components ignore it

    /// Relative paths in the file resolve against the file's directory.
    static ExperimentConfig from_file(const std::filesystem::path& path);
};

}  // namespace crossflow
