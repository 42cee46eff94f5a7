#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "crossflow/embedding.hpp"
#include "crossflow/vector_store.hpp"

namespace crossflow {

/// Quality of a retrieval, ordered Correct > Ambiguous > Incorrect.
enum class RelevanceLabel { Incorrect = 0, Ambiguous = 1, Correct = 2 };

std::string to_string(RelevanceLabel label);

/// Everything gathered for one query: scored hits, their quality label, and
/// any snippets a fallback provider contributed when retrieval fell short.
struct ContextBundle {
    std::vector<RetrievalHit> hits;
    RelevanceLabel label = RelevanceLabel::Incorrect;
    std::vector<std::string> fallback_snippets;
    std::string query;
    std::vector<std::string> warnings;
};

/// Supplies extra snippets for queries whose retrieval was Ambiguous or
/// Incorrect. Implementations must be safe for concurrent use.
class FallbackProvider {
public:
    virtual ~FallbackProvider() = default;
    virtual std::vector<std::string> fetch(const std::string& query) = 0;
};

/// Fallback provider serving canned snippets from a JSON file mapping query
/// text to a list of strings. Unknown queries yield no snippets.
class FixtureFallback final : public FallbackProvider {
public:
    static FixtureFallback from_file(const std::filesystem::path& path);

    std::vector<std::string> fetch(const std::string& query) override;

private:
    std::map<std::string, std::vector<std::string>> snippets_;
};

struct RagParams {
    std::size_t k = 5;
    double tau_hi = 0.75;
    double tau_lo = 0.40;
};

/// Two-threshold rule on the best hit's score: score >= tau_hi is Correct,
/// tau_lo <= score < tau_hi is Ambiguous, below tau_lo is Incorrect. An empty
/// retrieval is classified as score -1. Requires -1 <= tau_lo < tau_hi <= 1.
RelevanceLabel classify_relevance(double best_score, double tau_hi, double tau_lo);

/// Embeds the query, takes top-k from the store, classifies the result, and —
/// for non-Correct labels with a provider configured — appends fallback
/// snippets. A fallback failure is recorded as a warning and the bundle is
/// returned without snippets. Never errors on an empty store.
ContextBundle retrieve_context(const std::string& query, const VectorStore& store,
                               const Embedder& embedder, const RagParams& params,
                               FallbackProvider* fallback);

/// The retrieval pipeline bound to one store; null store means retrieval is
/// unavailable and every query classifies as Incorrect with no hits.
struct RagPipeline {
    const VectorStore* store = nullptr;
    const Embedder* embedder = nullptr;
    RagParams params;
    FallbackProvider* fallback = nullptr;

    ContextBundle retrieve(const std::string& query) const;
};

/// Renders the final model prompt. Byte-exact layout with '\n' endings:
/// a SYSTEM line, a CONTEXT: line followed by hit texts then fallback snippets
/// separated by '---' lines, and a QUESTION line. No trailing newline.
std::string assemble_prompt(const std::string& query, const ContextBundle& bundle,
                            const std::string& system_prompt);

}  // namespace crossflow
