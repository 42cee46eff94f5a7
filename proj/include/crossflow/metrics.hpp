#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "crossflow/embedding.hpp"

namespace crossflow {

/// Unigram-overlap scores. f1 = 2PR/(P+R), 0 when P+R = 0.
struct Rouge1Score {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Clipped unigram overlap: the shared count of each distinct word is
/// min(candidate count, reference count). Precision normalizes by candidate
/// length, recall by reference length; empty sides score 0.
Rouge1Score rouge1(const std::string& candidate, const std::string& reference);

/// cosine(embed(candidate), embed(reference)) under the given embedder.
double cosine_answer_similarity(const std::string& candidate, const std::string& reference,
                                const Embedder& embedder);

/// completion_tokens / elapsed_s. Throws UsageError when elapsed_s <= 0.
double throughput(long completion_tokens, double elapsed_s);

/// Per-(flow, question) metric values.
struct MetricRecord {
    std::string flow_id;
    std::string question_id;
    Rouge1Score rouge1;
    double cosine = 0.0;
    double tokens_per_second = 0.0;
};

/// Unweighted arithmetic means over one flow's records.
struct FlowAverages {
    std::size_t count = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double cosine = 0.0;
    double tokens_per_second = 0.0;
};

/// Per-flow averages over all questions; flows with zero records are absent.
/// Throws UsageError on empty input.
std::map<std::string, FlowAverages> aggregate(std::span<const MetricRecord> records);

}  // namespace crossflow
