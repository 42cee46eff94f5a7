#include "crossflow/metrics.hpp"

#include <map>

#include "crossflow/corpus.hpp"
#include "crossflow/errors.hpp"

namespace crossflow {

Rouge1Score rouge1(const std::string& candidate, const std::string& reference) {
    const std::vector<std::string> cand = tokenize(candidate);
    const std::vector<std::string> ref = tokenize(reference);

    std::map<std::string, long> ref_counts;
    for (const std::string& token : ref) ++ref_counts[token];

    std::map<std::string, long> cand_counts;
    for (const std::string& token : cand) ++cand_counts[token];

    long overlap = 0;
    for (const auto& [token, count] : cand_counts) {
        auto it = ref_counts.find(token);
        if (it != ref_counts.end()) overlap += std::min(count, it->second);
    }

    Rouge1Score score;
    score.precision = cand.empty() ? 0.0 : static_cast<double>(overlap) / static_cast<double>(cand.size());
    score.recall = ref.empty() ? 0.0 : static_cast<double>(overlap) / static_cast<double>(ref.size());
    score.f1 = (score.precision + score.recall) == 0.0
                   ? 0.0
                   : 2.0 * score.precision * score.recall / (score.precision + score.recall);
    return score;
}

double cosine_answer_similarity(const std::string& candidate, const std::string& reference,
                                const Embedder& embedder) {
    return cosine(embedder.embed(candidate), embedder.embed(reference));
}

double throughput(long completion_tokens, double elapsed_s) {
    if (elapsed_s <= 0.0) {
        throw UsageError("throughput: elapsed time must be positive, got " +
                         std::to_string(elapsed_s));
    }
    return static_cast<double>(completion_tokens) / elapsed_s;
}

std::map<std::string, FlowAverages> aggregate(std::span<const MetricRecord> records) {
    if (records.empty()) {
        throw UsageError("aggregate: no metric records");
    }

    std::map<std::string, FlowAverages> sums;
    for (const MetricRecord& r : records) {
        FlowAverages& acc = sums[r.flow_id];
        ++acc.count;
        acc.precision += r.rouge1.precision;
        acc.recall += r.rouge1.recall;
        acc.f1 += r.rouge1.f1;
        acc.cosine += r.cosine;
        acc.tokens_per_second += r.tokens_per_second;
    }
    for (auto& [flow_id, acc] : sums) {
        const double n = static_cast<double>(acc.count);
        acc.precision /= n;
        acc.recall /= n;
        acc.f1 /= n;
        acc.cosine /= n;
        acc.tokens_per_second /= n;
    }
    return sums;
}

}  // namespace crossflow
