#include "crossflow/rag.hpp"

#include "crossflow/errors.hpp"
#include "crossflow/json_io.hpp"
#include "crossflow/log.hpp"

namespace crossflow {

std::string to_string(RelevanceLabel label) {
    switch (label) {
        case RelevanceLabel::Correct: return "correct";
        case RelevanceLabel::Ambiguous: return "ambiguous";
        case RelevanceLabel::Incorrect: return "incorrect";
    }
    return "incorrect";
}

RelevanceLabel classify_relevance(double best_score, double tau_hi, double tau_lo) {
    if (!(tau_lo >= -1.0 && tau_lo < tau_hi && tau_hi <= 1.0)) {
        throw ConfigError("invalid relevance thresholds: need -1 <= tau_lo < tau_hi <= 1, got tau_lo=" +
                          std::to_string(tau_lo) + ", tau_hi=" + std::to_string(tau_hi));
    }
    if (best_score >= tau_hi) return RelevanceLabel::Correct;
    if (best_score >= tau_lo) return RelevanceLabel::Ambiguous;
    return RelevanceLabel::Incorrect;
}

ContextBundle retrieve_context(const std::string& query, const VectorStore& store,
                               const Embedder& embedder, const RagParams& params,
                               FallbackProvider* fallback) {
    ContextBundle bundle;
    bundle.query = query;

    const Embedding query_vec = embedder.embed(query);
    bundle.hits = store.top_k(query_vec, params.k);
    const double best = bundle.hits.empty() ? -1.0 : bundle.hits.front().score;
    bundle.label = classify_relevance(best, params.tau_hi, params.tau_lo);

    if (bundle.label != RelevanceLabel::Correct && fallback != nullptr) {
        try {
            bundle.fallback_snippets = fallback->fetch(query);
        } catch (const std::exception& e) {
            const std::string message =
                "fallback provider failed for query '" + query + "': " + e.what();
            bundle.warnings.push_back(message);
            warn(message);
            bundle.fallback_snippets.clear();
        }
    }
    return bundle;
}

ContextBundle RagPipeline::retrieve(const std::string& query) const {
    if (store == nullptr || embedder == nullptr) {
        ContextBundle bundle;
        bundle.query = query;
        bundle.label = classify_relevance(-1.0, params.tau_hi, params.tau_lo);
        return bundle;
    }
    return retrieve_context(query, *store, *embedder, params, fallback);
}

std::string assemble_prompt(const std::string& query, const ContextBundle& bundle,
                            const std::string& system_prompt) {
    std::string out = "SYSTEM: " + system_prompt + "\nCONTEXT:\n";
    bool first = true;
    auto append_section = [&](const std::string& text) {
        if (!first) out += "---\n";
        out += text;
        out += '\n';
        first = false;
    };
    for (const RetrievalHit& hit : bundle.hits) append_section(hit.text);
    for (const std::string& snippet : bundle.fallback_snippets) append_section(snippet);
    out += "QUESTION: " + query;
    return out;
}

FixtureFallback FixtureFallback::from_file(const std::filesystem::path& path) {
    const json doc = parse_json_file(path);
    if (!doc.is_object()) {
        throw ConfigError(path.string() + ": fallback fixture must be an object of query -> snippets");
    }
    FixtureFallback provider;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!it.value().is_array()) {
            throw ConfigError(path.string() + ": snippets for query '" + it.key() +
                              "' must be an array of strings");
        }
        std::vector<std::string> snippets;
        for (const auto& snippet : it.value()) {
            if (!snippet.is_string()) {
                throw ConfigError(path.string() + ": snippets for query '" + it.key() +
                                  "' must be an array of strings");
            }
            snippets.push_back(snippet.get<std::string>());
        }
        provider.snippets_[it.key()] = std::move(snippets);
    }
    return provider;
}

std::vector<std::string> FixtureFallback::fetch(const std::string& query) {
    auto it = snippets_.find(query);
    if (it == snippets_.end()) return {};
    return it->second;
}

}  // namespace crossflow
