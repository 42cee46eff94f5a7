#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossflow/backend.hpp"
#include "crossflow/errors.hpp"
#include "crossflow/questions.hpp"
#include "crossflow/rag.hpp"
#include "crossflow/vector_store.hpp"

namespace crossflow {

/// Which prior agent outputs the next agent observes.
enum class ContextPolicy { FullHistory, LastMessageOnly };

/// Knowledge augmentation available to an agent.
enum class KnowledgeKind { None, LocalRag };

std::string to_string(ContextPolicy policy);
std::string to_string(KnowledgeKind kind);

/// A configured domain agent. Agent specs are data: the roster and its domains
/// come from configuration, not code.
struct AgentSpec {
    std::string agent_id;  ///< unique within a flow
    std::string domain;
    std::string system_prompt;
    KnowledgeKind knowledge = KnowledgeKind::None;
    int max_react_steps = 4;
};

enum class ActionKind { Retrieve, Answer };

struct AgentAction {
    ActionKind kind = ActionKind::Answer;
    std::string payload;
};

/// Parses the trailing directive of a model output. The last non-empty line
/// decides: "RETRIEVE: <query>" requests retrieval, "ANSWER: <text>"
/// terminates with that payload, and output with no directive is treated as
/// an answer whose payload is the whole text.
AgentAction parse_action(const std::string& model_text);

inline constexpr std::string_view kRetrieveDirective = "RETRIEVE:";
inline constexpr std::string_view kAnswerDirective = "ANSWER:";

/// One observe/think/act cycle of the agent loop.
struct ReactStep {
    std::string observation;  ///< the full prompt the model saw this step
    std::string model_text;   ///< raw model output
    AgentAction action;
};

/// The output of one agent run: its final answer plus the full step trace and
/// token/time accounting summed over its completion calls.
struct AgentMessage {
    std::string agent_id;
    std::string content;  ///< payload of the final ANSWER action
    std::vector<ReactStep> steps;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    double elapsed_s = 0.0;  ///< sum of backend-reported elapsed time
    bool truncated = false;  ///< step cap reached without an ANSWER directive
};

/// An agent run aborted by a backend failure; carries the partial trace.
class AgentError : public Error {
public:
    AgentError(const std::string& what, AgentMessage partial)
        : Error(what), partial_(std::move(partial)) {}

    const AgentMessage& partial() const { return partial_; }

private:
    AgentMessage partial_;
};

/// One workflow topology: an ordered agent pipeline, a context policy, and a
/// label naming the retrieval pathway recorded in run metadata.
struct FlowConfig {
    std::string flow_id;  ///< "1".."4" for the presets, or a custom name
    std::vector<AgentSpec> agents;
    ContextPolicy context_policy = ContextPolicy::FullHistory;
    std::string retrieval_pathway;  ///< "local_rag" | "assistant_emulated" | "none"
};

/// The timed, token-accounted result of running one flow on one question.
/// backend_elapsed_s sums the deterministic per-call durations and is part of
/// the canonical serialization; wall_elapsed_s is measured end to end and is
/// excluded from it.
struct FlowRunRecord {
    std::string flow_id;
    std::string question_id;
    std::string final_answer;  ///< last agent's content; empty when failed
    std::vector<AgentMessage> transcript;
    long total_prompt_tokens = 0;
    long total_completion_tokens = 0;
    double backend_elapsed_s = 0.0;
    double wall_elapsed_s = 0.0;
    bool failed = false;
    std::string error;
    std::string retrieval_pathway;

    /// Deterministic form: every field except wall-clock measurements, with
    /// object keys in sorted order. Byte-identical across reruns under the
    /// mock backend.
    nlohmann::json to_canonical_json() const;

    /// Canonical form plus wall-clock fields.
    nlohmann::json to_full_json() const;
};

/// Retrieval environment shared by every agent in a run: one store per domain
/// plus the embedder, thresholds, and optional fallback provider.
struct RagRuntime {
    const Embedder* embedder = nullptr;
    RagParams params;
    FallbackProvider* fallback = nullptr;
    std::map<std::string, VectorStore> stores;  ///< keyed by domain

    /// Pipeline for one agent; a null store when the agent has no local
    /// knowledge. Throws ConfigError when LocalRag is requested but the
    /// domain's index was never loaded.
    RagPipeline pipeline_for(const AgentSpec& spec) const;
};

/// Identifies the enclosing run so the mock backend can resolve scripted
/// responses; empty fields simply produce fewer lookup keys.
struct RunKey {
    std::string flow_id;
    std::string question_id;
};

/// Builds the text an agent observes: the question, then prior agent contents
/// according to the policy, each prefixed "[<agent_id>]: ". The first agent
/// sees only the question under both policies.
std::string build_observation(ContextPolicy policy, std::span<const AgentMessage> transcript,
                              const std::string& question);

/// Runs the observe/think/act loop for one agent. Each step assembles a prompt
/// from the observed text plus everything retrieved so far, makes one
/// completion call, and executes the trailing directive. RETRIEVE queries the
/// agent's domain store (a no-op without local knowledge); ANSWER terminates.
/// Hitting the step cap flags the message truncated with the last model text
/// as its content. Backend failures raise AgentError with the partial trace.
AgentMessage run_agent(const AgentSpec& spec, const std::string& observed,
                       const RagRuntime& rag, Backend& backend, const RunKey& key = {});

/// Executes a flow's agents strictly in order, wiring each observation from
/// the transcript so far. An agent failure marks the run failed, preserves the
/// partial transcript, and skips the remaining agents.
FlowRunRecord run_flow(const FlowConfig& flow, const QuestionItem& question,
                       const RagRuntime& rag, Backend& backend);

/// The four preset workflow topologies over a shared roster:
///   1 full history, local retrieval on every agent
///   2 last-message-only, local retrieval (assistant-style retrieval emulated)
///   3 full history, local retrieval (assistant-style retrieval emulated)
///   4 full history, no knowledge augmentation (baseline)
/// Flows 1 and 3 differ only in the retrieval pathway label they record.
std::vector<FlowConfig> build_flow_presets(std::span<const AgentSpec> roster);

}  // namespace crossflow
