#include <doctest.h>

#include "crossflow/config.hpp"
#include "crossflow/errors.hpp"
#include "helpers.hpp"

using namespace crossflow;

namespace {

const std::string kMinimalAgents = R"(
  "agents": [
    {"agent_id": "a1", "domain": "d1", "system_prompt": "sp1"},
    {"agent_id": "a2", "domain": "d2", "system_prompt": "sp2"}
  ]
)";

/// Lays out a valid minimal experiment directory and returns the config path.
std::filesystem::path write_minimal(const testutil::TempDir& tmp, const std::string& extra = "") {
    std::filesystem::create_directories(tmp.path() / "corpora" / "d1");
    std::filesystem::create_directories(tmp.path() / "corpora" / "d2");
    testutil::write_file(tmp.path() / "questions.jsonl",
                         R"({"question_id":"q1","domain":"d1","question":"?","expected_answer":"ref"})"
                         "\n");
    const auto path = tmp.path() / "config.json";
    std::string body = "{\n  \"corpora_root\": \"corpora\",\n  \"questions\": \"questions.jsonl\",\n" +
                       kMinimalAgents;
    if (!extra.empty()) body += ",\n" + extra;
    body += "\n}";
    testutil::write_file(path, body);
    return path;
}

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("minimal config applies documented defaults") {
    testutil::TempDir tmp;
    const ExperimentConfig cfg = ExperimentConfig::from_file(write_minimal(tmp));

    CHECK(cfg.chunk_size == 512);
    CHECK(cfg.chunk_overlap == 64);
    CHECK(cfg.embedding.kind == "hash");
    CHECK(cfg.embedding.dim == 256);
    CHECK(cfg.retrieval.k == 5);
    CHECK(cfg.rag.tau_hi == 0.75);
    CHECK(cfg.rag.tau_lo == 0.40);
    CHECK(cfg.rag.fallback == "none");
    CHECK(cfg.backend.kind == "mock");
    CHECK(cfg.parallelism == 1);
    CHECK(cfg.roster.size() == 2);
    CHECK(cfg.roster[0].max_react_steps == 4);
    CHECK(cfg.flows.presets == std::vector<std::string>{"1", "2", "3", "4"});
    CHECK(cfg.output_dir == tmp.path() / "out");
    CHECK(cfg.corpora_root == tmp.path() / "corpora");
}

TEST_CASE("unknown keys are rejected everywhere") {
    testutil::TempDir tmp;

    SUBCASE("top level") {
        const auto path = write_minimal(tmp, R"("chunk_sizes": 128)");
        CHECK_THROWS_WITH_AS(ExperimentConfig::from_file(path),
                             doctest::Contains("chunk_sizes"), ConfigError);
    }
    SUBCASE("nested section") {
        const auto path = write_minimal(tmp, R"("embedding": {"kind": "hash", "dims": 64})");
        CHECK_THROWS_WITH_AS(ExperimentConfig::from_file(path), doctest::Contains("dims"),
                             ConfigError);
    }
    SUBCASE("agent entry") {
        std::filesystem::create_directories(tmp.path() / "corpora");
        testutil::write_file(tmp.path() / "questions.jsonl", "");
        const auto path = tmp.path() / "config.json";
        testutil::write_file(path, R"({
  "corpora_root": "corpora", "questions": "questions.jsonl",
  "agents": [{"agent_id": "a", "domain": "d", "system_prompt": "s", "knowlege": "none"}]
})");
        CHECK_THROWS_WITH_AS(ExperimentConfig::from_file(path), doctest::Contains("knowlege"),
                             ConfigError);
    }
}

TEST_CASE("validation failures") {
    testutil::TempDir tmp;

    SUBCASE("missing corpora root") {
        testutil::write_file(tmp.path() / "questions.jsonl", "");
        const auto path = tmp.path() / "config.json";
        testutil::write_file(path, R"({"corpora_root": "nope", "questions": "questions.jsonl",)" +
                                       kMinimalAgents + "}");
        CHECK_THROWS_AS(ExperimentConfig::from_file(path), ConfigError);
    }
    SUBCASE("chunk overlap must stay below chunk size") {
        const auto path = write_minimal(tmp, R"("chunk_size": 64, "chunk_overlap": 64)");
        CHECK_THROWS_AS(ExperimentConfig::from_file(path), ConfigError);
    }
    SUBCASE("inverted rag thresholds") {
        const auto path = write_minimal(tmp, R"("rag": {"tau_hi": 0.3, "tau_lo": 0.6})");
        CHECK_THROWS_AS(ExperimentConfig::from_file(path), ConfigError);
    }
    SUBCASE("duplicate agent ids") {
        std::filesystem::create_directories(tmp.path() / "corpora");
        testutil::write_file(tmp.path() / "questions.jsonl", "");
        const auto path = tmp.path() / "config.json";
        testutil::write_file(path, R"({
  "corpora_root": "corpora", "questions": "questions.jsonl",
  "agents": [{"agent_id": "a", "domain": "d", "system_prompt": "s"},
             {"agent_id": "a", "domain": "e", "system_prompt": "s"}]
})");
        CHECK_THROWS_AS(ExperimentConfig::from_file(path), ConfigError);
    }
    SUBCASE("http backend needs a base_url") {
        const auto path = write_minimal(tmp, R"("backend": {"kind": "http"})");
        CHECK_THROWS_AS(ExperimentConfig::from_file(path), ConfigError);
    }
    SUBCASE("mock fixture path must exist") {
        const auto path =
            write_minimal(tmp, R"("backend": {"kind": "mock", "fixture": "missing.json"})");
        CHECK_THROWS_AS(ExperimentConfig::from_file(path), ConfigError);
    }
    SUBCASE("syntax error carries a line number") {
        const auto path = tmp.path() / "bad.json";
        testutil::write_file(path, "{\n  \"corpora_root\": ,\n}");
        CHECK_THROWS_WITH_AS(ExperimentConfig::from_file(path), doctest::Contains(":2"),
                             ConfigError);
    }
}

TEST_CASE("flow selection forms") {
    testutil::TempDir tmp;

    SUBCASE("preset subset") {
        const auto path = write_minimal(tmp, R"("flows": {"presets": [1, 4]})");
        const ExperimentConfig cfg = ExperimentConfig::from_file(path);
        CHECK(cfg.flows.presets == std::vector<std::string>{"1", "4"});
    }
    SUBCASE("custom flows with agent subsets") {
        const auto path = write_minimal(tmp, R"("flows": {
          "custom": [{"flow_id": "solo", "context_policy": "last_message_only",
                      "knowledge": "local_rag", "agents": ["a2"]}]
        })");
        const ExperimentConfig cfg = ExperimentConfig::from_file(path);
        REQUIRE(cfg.flows.custom.size() == 1);
        CHECK(cfg.flows.custom[0].context_policy == ContextPolicy::LastMessageOnly);
        CHECK(cfg.flows.custom[0].knowledge == KnowledgeKind::LocalRag);
        CHECK(cfg.flows.custom[0].retrieval_pathway == "local_rag");
        CHECK(cfg.flows.custom[0].agent_ids == std::vector<std::string>{"a2"});
    }
    SUBCASE("out-of-range preset id") {
        const auto path = write_minimal(tmp, R"("flows": {"presets": [5]})");
        CHECK_THROWS_AS(ExperimentConfig::from_file(path), ConfigError);
    }
    SUBCASE("duplicate flow ids across presets and custom") {
        const auto path = write_minimal(tmp, R"("flows": {
          "presets": [1],
          "custom": [{"flow_id": "1", "context_policy": "full_history", "knowledge": "none"}]
        })");
        CHECK_THROWS_AS(ExperimentConfig::from_file(path), ConfigError);
    }
    SUBCASE("custom flow naming an unknown agent") {
        const auto path = write_minimal(tmp, R"("flows": {
          "custom": [{"flow_id": "x", "context_policy": "full_history",
                      "knowledge": "none", "agents": ["ghost"]}]
        })");
        CHECK_THROWS_AS(ExperimentConfig::from_file(path), ConfigError);
    }
}

TEST_CASE("fixture fallback paths resolve against the config directory") {
    testutil::TempDir tmp;
    testutil::write_file(tmp.path() / "fallback.json", R"({"q": ["snippet"]})");
    const auto path = write_minimal(
        tmp, R"("rag": {"tau_hi": 0.8, "tau_lo": 0.2, "fallback": "fixture:fallback.json"})");

    const ExperimentConfig cfg = ExperimentConfig::from_file(path);
    CHECK(cfg.rag.tau_hi == 0.8);
    REQUIRE(cfg.rag.fallback.starts_with("fixture:"));
    CHECK(cfg.rag.fallback.find("fallback.json") != std::string::npos);

    SUBCASE("missing fixture file is rejected") {
        const auto bad = write_minimal(
            tmp, R"("rag": {"fallback": "fixture:ghost.json"})");
        CHECK_THROWS_AS(ExperimentConfig::from_file(bad), ConfigError);
    }
    SUBCASE("unrecognized fallback form is rejected") {
        const auto bad = write_minimal(tmp, R"("rag": {"fallback": "websearch"})");
        CHECK_THROWS_AS(ExperimentConfig::from_file(bad), ConfigError);
    }
}

TEST_CASE("question set loading") {
    testutil::TempDir tmp;
    const auto path = tmp.path() / "questions.jsonl";

    SUBCASE("valid file") {
        testutil::write_file(
            path,
            R"({"question_id":"q1","domain":"d","question":"one?","expected_answer":"ans one"})"
            "\n"
            R"({"question_id":"q2","domain":"d","question":"two?","expected_answer":"ans two"})"
            "\n");
        const auto questions = load_questions(path);
        REQUIRE(questions.size() == 2);
        CHECK(questions[0].question_id == "q1");
        CHECK(questions[1].expected_answer == "ans two");
    }
    SUBCASE("duplicate id rejected with line number") {
        testutil::write_file(
            path, R"({"question_id":"q1","domain":"d","question":"a","expected_answer":"x"})"
                  "\n"
                  R"({"question_id":"q1","domain":"d","question":"b","expected_answer":"y"})"
                  "\n");
        CHECK_THROWS_WITH_AS(load_questions(path), doctest::Contains(":2"), ConfigError);
    }
    SUBCASE("empty expected answer rejected") {
        testutil::write_file(
            path, R"({"question_id":"q1","domain":"d","question":"a","expected_answer":""})"
                  "\n");
        CHECK_THROWS_AS(load_questions(path), ConfigError);
    }
    SUBCASE("extra field rejected") {
        testutil::write_file(path,
                             R"({"question_id":"q1","domain":"d","question":"a",)"
                             R"("expected_answer":"x","hint":"no"})"
                             "\n");
        CHECK_THROWS_AS(load_questions(path), ConfigError);
    }
}

TEST_SUITE_END();
