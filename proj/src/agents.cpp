#include "crossflow/agents.hpp"

#include <algorithm>
#include <chrono>

#include "crossflow/json_io.hpp"

namespace crossflow {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](unsigned char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
    };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string_view last_line(std::string_view s) {
    const std::size_t pos = s.rfind('\n');
    return pos == std::string_view::npos ? s : s.substr(pos + 1);
}

}  // namespace

std::string to_string(ContextPolicy policy) {
    return policy == ContextPolicy::FullHistory ? "full_history" : "last_message_only";
}

std::string to_string(KnowledgeKind kind) {
    return kind == KnowledgeKind::LocalRag ? "local_rag" : "none";
}

AgentAction parse_action(const std::string& model_text) {
    const std::string_view text = trim(model_text);
    const std::string_view line = trim(last_line(text));
    if (line.starts_with(kRetrieveDirective)) {
        return {ActionKind::Retrieve, std::string(trim(line.substr(kRetrieveDirective.size())))};
    }
    if (line.starts_with(kAnswerDirective)) {
        return {ActionKind::Answer, std::string(trim(line.substr(kAnswerDirective.size())))};
    }
    return {ActionKind::Answer, std::string(text)};
}

RagPipeline RagRuntime::pipeline_for(const AgentSpec& spec) const {
    RagPipeline pipeline;
    pipeline.embedder = embedder;
    pipeline.params = params;
    pipeline.fallback = fallback;
    if (spec.knowledge == KnowledgeKind::LocalRag) {
        auto it = stores.find(spec.domain);
        if (it == stores.end()) {
            throw ConfigError("no index loaded for domain '" + spec.domain + "' required by agent '" +
                              spec.agent_id + "'");
        }
        pipeline.store = &it->second;
    }
    return pipeline;
}

std::string build_observation(ContextPolicy policy, std::span<const AgentMessage> transcript,
                              const std::string& question) {
    std::string out = question;
    if (transcript.empty()) return out;

    if (policy == ContextPolicy::FullHistory) {
        for (const AgentMessage& msg : transcript) {
            out += "\n[" + msg.agent_id + "]: " + msg.content;
        }
    } else {
        const AgentMessage& last = transcript.back();
        out += "\n[" + last.agent_id + "]: " + last.content;
    }
    return out;
}

namespace {

std::vector<std::string> scripted_keys_for(const RunKey& key, const std::string& agent_id) {
    std::vector<std::string> keys;
    if (!key.flow_id.empty() && !key.question_id.empty()) {
        keys.push_back(key.flow_id + "|" + agent_id + "|" + key.question_id);
    }
    if (!key.question_id.empty()) {
        keys.push_back(agent_id + "|" + key.question_id);
    }
    return keys;
}

}  // namespace

AgentMessage run_agent(const AgentSpec& spec, const std::string& observed,
                       const RagRuntime& rag, Backend& backend, const RunKey& key) {
    AgentMessage msg;
    msg.agent_id = spec.agent_id;

    const RagPipeline pipeline = rag.pipeline_for(spec);
    ContextBundle gathered;  // accumulates hits and snippets across RETRIEVE actions
    gathered.query = observed;

    const int max_steps = std::max(spec.max_react_steps, 1);
    for (int step = 0; step < max_steps; ++step) {
        const std::string prompt = assemble_prompt(observed, gathered, spec.system_prompt);

        CompletionRequest req;
        req.prompt = prompt;
        req.temperature = 0.0;
        req.scripted_keys = scripted_keys_for(key, spec.agent_id);
        req.step_index = step;

        CompletionResult result;
        try {
            result = backend.complete(req);
        } catch (const BackendError& e) {
            throw AgentError("agent '" + spec.agent_id + "' failed: " + e.what(), std::move(msg));
        }

        msg.prompt_tokens += result.prompt_tokens;
        msg.completion_tokens += result.completion_tokens;
        msg.elapsed_s += result.elapsed_s;

        const AgentAction action = parse_action(result.text);
        msg.steps.push_back(ReactStep{prompt, result.text, action});

        if (action.kind == ActionKind::Answer) {
            msg.content = action.payload;
            return msg;
        }

        // Retrieve: a no-op for agents without local knowledge.
        if (pipeline.store != nullptr) {
            ContextBundle bundle = pipeline.retrieve(action.payload);
            gathered.hits.insert(gathered.hits.end(), bundle.hits.begin(), bundle.hits.end());
            gathered.fallback_snippets.insert(gathered.fallback_snippets.end(),
                                              bundle.fallback_snippets.begin(),
                                              bundle.fallback_snippets.end());
        }
    }

    msg.truncated = true;
    msg.content = msg.steps.back().model_text;
    return msg;
}

FlowRunRecord run_flow(const FlowConfig& flow, const QuestionItem& question,
                       const RagRuntime& rag, Backend& backend) {
    FlowRunRecord record;
    record.flow_id = flow.flow_id;
    record.question_id = question.question_id;
    record.retrieval_pathway = flow.retrieval_pathway;

    const auto started = std::chrono::steady_clock::now();
    const RunKey key{flow.flow_id, question.question_id};

    for (const AgentSpec& spec : flow.agents) {
        const std::string observed =
            build_observation(flow.context_policy, record.transcript, question.question);
        try {
            record.transcript.push_back(run_agent(spec, observed, rag, backend, key));
        } catch (const AgentError& e) {
            record.transcript.push_back(e.partial());
            record.failed = true;
            record.error = e.what();
            break;
        }
    }

    for (const AgentMessage& msg : record.transcript) {
        record.total_prompt_tokens += msg.prompt_tokens;
        record.total_completion_tokens += msg.completion_tokens;
        record.backend_elapsed_s += msg.elapsed_s;
    }
    if (!record.failed && !record.transcript.empty()) {
        record.final_answer = record.transcript.back().content;
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    // End-to-end time can never undercut the per-call durations it contains.
    record.wall_elapsed_s = std::max(wall, record.backend_elapsed_s);
    return record;
}

std::vector<FlowConfig> build_flow_presets(std::span<const AgentSpec> roster) {
    auto with_knowledge = [&roster](KnowledgeKind kind) {
        std::vector<AgentSpec> agents(roster.begin(), roster.end());
        for (AgentSpec& spec : agents) spec.knowledge = kind;
        return agents;
    };

    std::vector<FlowConfig> flows;
    flows.push_back({"1", with_knowledge(KnowledgeKind::LocalRag), ContextPolicy::FullHistory,
                     "local_rag"});
    flows.push_back({"2", with_knowledge(KnowledgeKind::LocalRag), ContextPolicy::LastMessageOnly,
                     "assistant_emulated"});
    flows.push_back({"3", with_knowledge(KnowledgeKind::LocalRag), ContextPolicy::FullHistory,
                     "assistant_emulated"});
    flows.push_back({"4", with_knowledge(KnowledgeKind::None), ContextPolicy::FullHistory,
                     "none"});
    return flows;
}

namespace {

json action_to_json(const AgentAction& action) {
    json j;
    j["kind"] = action.kind == ActionKind::Retrieve ? "retrieve" : "answer";
    j["payload"] = action.payload;
    return j;
}

json message_to_json(const AgentMessage& msg) {
    json j;
    j["agent_id"] = msg.agent_id;
    j["content"] = msg.content;
    j["prompt_tokens"] = msg.prompt_tokens;
    j["completion_tokens"] = msg.completion_tokens;
    j["elapsed_s"] = msg.elapsed_s;
    j["truncated"] = msg.truncated;
    json steps = json::array();
    for (const ReactStep& step : msg.steps) {
        json s;
        s["observation"] = step.observation;
        s["model_text"] = step.model_text;
        s["action"] = action_to_json(step.action);
        steps.push_back(std::move(s));
    }
    j["steps"] = std::move(steps);
    return j;
}

}  // namespace

json FlowRunRecord::to_canonical_json() const {
    json j;
    j["flow_id"] = flow_id;
    j["question_id"] = question_id;
    j["final_answer"] = final_answer;
    j["total_prompt_tokens"] = total_prompt_tokens;
    j["total_completion_tokens"] = total_completion_tokens;
    j["backend_elapsed_s"] = backend_elapsed_s;
    j["failed"] = failed;
    j["error"] = error;
    j["retrieval_pathway"] = retrieval_pathway;
    json transcript_json = json::array();
    for (const AgentMessage& msg : transcript) transcript_json.push_back(message_to_json(msg));
    j["transcript"] = std::move(transcript_json);
    return j;
}

json FlowRunRecord::to_full_json() const {
    json j = to_canonical_json();
    j["wall_elapsed_s"] = wall_elapsed_s;
    return j;
}

}  // namespace crossflow
