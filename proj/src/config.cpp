#include "crossflow/config.hpp"

#include <algorithm>
#include <set>

#include "crossflow/errors.hpp"
#include "crossflow/json_io.hpp"

namespace crossflow {

namespace {

namespace fs = std::filesystem;

fs::path resolve(const fs::path& base_dir, const std::string& value) {
    const fs::path p(value);
    return p.is_absolute() ? p : base_dir / p;
}

std::size_t as_size(const json& j, const std::string& context) {
    const long v = as_integer(j, context);
    if (v < 0) throw ConfigError(context + ": must be non-negative");
    return static_cast<std::size_t>(v);
}

ContextPolicy parse_policy(const std::string& value, const std::string& context) {
    if (value == "full_history") return ContextPolicy::FullHistory;
    if (value == "last_message_only") return ContextPolicy::LastMessageOnly;
    throw ConfigError(context + ": expected full_history | last_message_only, got '" + value + "'");
}

KnowledgeKind parse_knowledge(const std::string& value, const std::string& context) {
    if (value == "none") return KnowledgeKind::None;
    if (value == "local_rag") return KnowledgeKind::LocalRag;
    throw ConfigError(context + ": expected none | local_rag, got '" + value + "'");
}

EmbeddingConfig parse_embedding(const json& j, const std::string& context) {
    StrictObject obj(j, context);
    EmbeddingConfig cfg;
    if (const json* v = obj.get("kind")) cfg.kind = as_string(*v, context + ".kind");
    if (const json* v = obj.get("dim")) cfg.dim = as_size(*v, context + ".dim");
    if (const json* v = obj.get("base_url")) cfg.base_url = as_string(*v, context + ".base_url");
    if (const json* v = obj.get("model_id")) cfg.model_id = as_string(*v, context + ".model_id");
    if (const json* v = obj.get("timeout_s")) cfg.timeout_s = as_number(*v, context + ".timeout_s");
    obj.reject_unknown_keys();

    if (cfg.kind != "hash" && cfg.kind != "http") {
        throw ConfigError(context + ".kind: expected hash | http, got '" + cfg.kind + "'");
    }
    if (cfg.dim < 2) throw ConfigError(context + ".dim: must be at least 2");
    if (cfg.kind == "http" && cfg.base_url.empty()) {
        throw ConfigError(context + ": http embedding requires base_url");
    }
    if (cfg.timeout_s <= 0) throw ConfigError(context + ".timeout_s: must be positive");
    return cfg;
}

RetrievalConfig parse_retrieval(const json& j, const std::string& context) {
    StrictObject obj(j, context);
    RetrievalConfig cfg;
    if (const json* v = obj.get("k")) cfg.k = as_size(*v, context + ".k");
    obj.reject_unknown_keys();
    if (cfg.k < 1) throw ConfigError(context + ".k: must be at least 1");
    return cfg;
}

RagConfig parse_rag(const json& j, const std::string& context, const fs::path& base_dir) {
    StrictObject obj(j, context);
    RagConfig cfg;
    if (const json* v = obj.get("tau_hi")) cfg.tau_hi = as_number(*v, context + ".tau_hi");
    if (const json* v = obj.get("tau_lo")) cfg.tau_lo = as_number(*v, context + ".tau_lo");
    if (const json* v = obj.get("fallback")) cfg.fallback = as_string(*v, context + ".fallback");
    obj.reject_unknown_keys();

    if (!(cfg.tau_lo >= -1.0 && cfg.tau_lo < cfg.tau_hi && cfg.tau_hi <= 1.0)) {
        throw ConfigError(context + ": need -1 <= tau_lo < tau_hi <= 1");
    }
    if (cfg.fallback != "none") {
        constexpr std::string_view prefix = "fixture:";
        if (!cfg.fallback.starts_with(prefix)) {
            throw ConfigError(context + ".fallback: expected none | fixture:<path>, got '" +
                              cfg.fallback + "'");
        }
        const fs::path fixture = resolve(base_dir, cfg.fallback.substr(prefix.size()));
        if (!fs::is_regular_file(fixture)) {
            throw ConfigError(context + ".fallback: fixture file not found: " + fixture.string());
        }
        cfg.fallback = std::string(prefix) + fixture.string();
    }
    return cfg;
}

BackendSettings parse_backend(const json& j, const std::string& context, const fs::path& base_dir) {
    StrictObject obj(j, context);
    BackendSettings cfg;
    if (const json* v = obj.get("kind")) cfg.kind = as_string(*v, context + ".kind");
    if (const json* v = obj.get("fixture")) {
        cfg.fixture = resolve(base_dir, as_string(*v, context + ".fixture"));
    }
    if (const json* v = obj.get("base_url")) cfg.base_url = as_string(*v, context + ".base_url");
    if (const json* v = obj.get("model_id")) cfg.model_id = as_string(*v, context + ".model_id");
    if (const json* v = obj.get("timeout_s")) cfg.timeout_s = as_number(*v, context + ".timeout_s");
    if (const json* v = obj.get("max_inflight")) {
        cfg.max_inflight = static_cast<int>(as_integer(*v, context + ".max_inflight"));
    }
    if (const json* v = obj.get("retries")) {
        cfg.retries = static_cast<int>(as_integer(*v, context + ".retries"));
    }
    if (const json* v = obj.get("backoff_s")) cfg.backoff_s = as_number(*v, context + ".backoff_s");
    obj.reject_unknown_keys();

    if (cfg.kind != "mock" && cfg.kind != "http") {
        throw ConfigError(context + ".kind: expected mock | http, got '" + cfg.kind + "'");
    }
    if (cfg.kind == "http" && cfg.base_url.empty()) {
        throw ConfigError(context + ": http backend requires base_url");
    }
    if (!cfg.fixture.empty() && !fs::is_regular_file(cfg.fixture)) {
        throw ConfigError(context + ".fixture: file not found: " + cfg.fixture.string());
    }
    if (cfg.timeout_s <= 0) throw ConfigError(context + ".timeout_s: must be positive");
    if (cfg.max_inflight < 1) throw ConfigError(context + ".max_inflight: must be at least 1");
    if (cfg.retries < 0) throw ConfigError(context + ".retries: must be non-negative");
    if (cfg.backoff_s < 0) throw ConfigError(context + ".backoff_s: must be non-negative");
    return cfg;
}

std::vector<AgentSpec> parse_roster(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(context + ": expected a non-empty array of agent specs");
    }
    std::vector<AgentSpec> roster;
    std::set<std::string> seen;
    std::size_t index = 0;
    for (const auto& item : j) {
        const std::string where = context + "[" + std::to_string(index) + "]";
        StrictObject obj(item, where);
        AgentSpec spec;
        spec.agent_id = as_string(obj.require("agent_id"), where + ".agent_id");
        spec.domain = as_string(obj.require("domain"), where + ".domain");
        spec.system_prompt = as_string(obj.require("system_prompt"), where + ".system_prompt");
        if (const json* v = obj.get("max_react_steps")) {
            spec.max_react_steps = static_cast<int>(as_integer(*v, where + ".max_react_steps"));
        }
        obj.reject_unknown_keys();

        if (spec.agent_id.empty()) throw ConfigError(where + ".agent_id: must be non-empty");
        if (spec.domain.empty()) throw ConfigError(where + ".domain: must be non-empty");
        if (spec.max_react_steps < 1) {
            throw ConfigError(where + ".max_react_steps: must be at least 1");
        }
        if (!seen.insert(spec.agent_id).second) {
            throw ConfigError(where + ": duplicate agent_id '" + spec.agent_id + "'");
        }
        roster.push_back(std::move(spec));
        ++index;
    }
    return roster;
}

FlowSelection parse_flows(const json& j, const std::string& context,
                          const std::vector<AgentSpec>& roster) {
    FlowSelection selection;
    if (j.is_string()) {
        if (j.get<std::string>() != "presets") {
            throw ConfigError(context + ": the only string form is \"presets\"");
        }
        selection.presets = {"1", "2", "3", "4"};
        return selection;
    }

    StrictObject obj(j, context);
    if (const json* presets = obj.get("presets")) {
        if (!presets->is_array()) {
            throw ConfigError(context + ".presets: expected an array of flow ids 1..4");
        }
        for (const auto& id : *presets) {
            long v = as_integer(id, context + ".presets[]");
            if (v < 1 || v > 4) {
                throw ConfigError(context + ".presets[]: flow ids are 1..4, got " + std::to_string(v));
            }
            selection.presets.push_back(std::to_string(v));
        }
    }
    if (const json* custom = obj.get("custom")) {
        if (!custom->is_array()) throw ConfigError(context + ".custom: expected an array");
        std::size_t index = 0;
        for (const auto& item : *custom) {
            const std::string where = context + ".custom[" + std::to_string(index) + "]";
            StrictObject flow_obj(item, where);
            CustomFlowConfig flow;
            flow.flow_id = as_string(flow_obj.require("flow_id"), where + ".flow_id");
            flow.context_policy = parse_policy(
                as_string(flow_obj.require("context_policy"), where + ".context_policy"),
                where + ".context_policy");
            flow.knowledge = parse_knowledge(
                as_string(flow_obj.require("knowledge"), where + ".knowledge"),
                where + ".knowledge");
            if (const json* v = flow_obj.get("retrieval_pathway")) {
                flow.retrieval_pathway = as_string(*v, where + ".retrieval_pathway");
            } else {
                flow.retrieval_pathway =
                    flow.knowledge == KnowledgeKind::LocalRag ? "local_rag" : "none";
            }
            if (const json* v = flow_obj.get("agents")) {
                if (!v->is_array() || v->empty()) {
                    throw ConfigError(where + ".agents: expected a non-empty array of agent ids");
                }
                for (const auto& id : *v) {
                    flow.agent_ids.push_back(as_string(id, where + ".agents[]"));
                }
            }
            flow_obj.reject_unknown_keys();

            if (flow.flow_id.empty()) throw ConfigError(where + ".flow_id: must be non-empty");
            for (const std::string& id : flow.agent_ids) {
                const bool known = std::any_of(roster.begin(), roster.end(),
                                               [&](const AgentSpec& s) { return s.agent_id == id; });
                if (!known) {
                    throw ConfigError(where + ".agents: unknown agent_id '" + id + "'");
                }
            }
            selection.custom.push_back(std::move(flow));
            ++index;
        }
    }
    obj.reject_unknown_keys();

    if (selection.presets.empty() && selection.custom.empty()) {
        throw ConfigError(context + ": selects no flows");
    }

    std::set<std::string> ids(selection.presets.begin(), selection.presets.end());
    for (const CustomFlowConfig& flow : selection.custom) {
        if (!ids.insert(flow.flow_id).second) {
            throw ConfigError(context + ": duplicate flow id '" + flow.flow_id + "'");
        }
    }
    return selection;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
    const json doc = parse_json_file(path);
    const fs::path base_dir = fs::absolute(path).parent_path();
    const std::string context = path.string();

    StrictObject obj(doc, context);
    ExperimentConfig cfg;

    cfg.corpora_root = resolve(base_dir, as_string(obj.require("corpora_root"), context + ".corpora_root"));
    cfg.questions = resolve(base_dir, as_string(obj.require("questions"), context + ".questions"));
    if (const json* v = obj.get("output_dir")) {
        cfg.output_dir = resolve(base_dir, as_string(*v, context + ".output_dir"));
    } else {
        cfg.output_dir = base_dir / "out";
    }
    if (const json* v = obj.get("chunk_size")) cfg.chunk_size = as_size(*v, context + ".chunk_size");
    if (const json* v = obj.get("chunk_overlap")) {
        cfg.chunk_overlap = as_size(*v, context + ".chunk_overlap");
    }
    if (const json* v = obj.get("embedding")) {
        cfg.embedding = parse_embedding(*v, context + ".embedding");
    }
    if (const json* v = obj.get("retrieval")) {
        cfg.retrieval = parse_retrieval(*v, context + ".retrieval");
    }
    if (const json* v = obj.get("rag")) cfg.rag = parse_rag(*v, context + ".rag", base_dir);
    if (const json* v = obj.get("backend")) {
        cfg.backend = parse_backend(*v, context + ".backend", base_dir);
    }
    cfg.roster = parse_roster(obj.require("agents"), context + ".agents");
    if (const json* v = obj.get("flows")) {
        cfg.flows = parse_flows(*v, context + ".flows", cfg.roster);
    } else {
        cfg.flows.presets = {"1", "2", "3", "4"};
    }
    if (const json* v = obj.get("parallelism")) {
        cfg.parallelism = static_cast<int>(as_integer(*v, context + ".parallelism"));
    }
    if (const json* v = obj.get("seed")) {
        const long s = as_integer(*v, context + ".seed");
        if (s < 0) throw ConfigError(context + ".seed: must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    obj.reject_unknown_keys();

    if (cfg.chunk_size == 0 || cfg.chunk_overlap >= cfg.chunk_size) {
        throw ConfigError(context + ": need 0 <= chunk_overlap < chunk_size");
    }
    if (cfg.parallelism < 1) throw ConfigError(context + ".parallelism: must be at least 1");
    if (!fs::is_directory(cfg.corpora_root)) {
        throw ConfigError(context + ".corpora_root: directory not found: " +
                          cfg.corpora_root.string());
    }
    if (!fs::is_regular_file(cfg.questions)) {
        throw ConfigError(context + ".questions: file not found: " + cfg.questions.string());
    }
    return cfg;
}

}  // namespace crossflow
