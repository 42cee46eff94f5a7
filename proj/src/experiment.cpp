#include "crossflow/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "crossflow/corpus.hpp"
#include "crossflow/errors.hpp"
#include "crossflow/http_embedder.hpp"
#include "crossflow/json_io.hpp"
#include "crossflow/log.hpp"

namespace crossflow {

namespace {

namespace fs = std::filesystem;

fs::path indexes_dir(const ExperimentConfig& cfg) { return cfg.output_dir / "indexes"; }
fs::path index_path(const ExperimentConfig& cfg, const std::string& domain) {
    return indexes_dir(cfg) / (domain + ".jsonl");
}
fs::path runs_path(const ExperimentConfig& cfg) { return cfg.output_dir / "runs.jsonl"; }
fs::path timings_path(const ExperimentConfig& cfg) { return cfg.output_dir / "timings.jsonl"; }
fs::path metrics_path(const ExperimentConfig& cfg) { return cfg.output_dir / "metrics.jsonl"; }

std::string format_fixed(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

/// Flow ids sort numerically when they parse as integers, else after all
/// numbers, lexicographically.
bool flow_id_less(const std::string& a, const std::string& b) {
    const auto parse = [](const std::string& s) -> std::pair<bool, long> {
        if (s.empty()) return {false, 0};
        for (char c : s) {
            if (c < '0' || c > '9') return {false, 0};
        }
        return {true, std::stol(s)};
    };
    const auto [a_num, a_val] = parse(a);
    const auto [b_num, b_val] = parse(b);
    if (a_num && b_num) return a_val < b_val;
    if (a_num != b_num) return a_num;
    return a < b;
}

}  // namespace

std::unique_ptr<Embedder> make_embedder(const ExperimentConfig& cfg) {
    if (cfg.embedding.kind == "http") {
        HttpEmbedderConfig http;
        http.base_url = cfg.embedding.base_url;
        http.model_id = cfg.embedding.model_id;
        http.dim = cfg.embedding.dim;
        http.timeout_s = cfg.embedding.timeout_s;
        if (const char* key = std::getenv("CROSSFLOW_API_KEY")) http.api_key = key;
        return std::make_unique<HttpEmbedder>(http);
    }
    return std::make_unique<HashEmbedder>(cfg.embedding.dim);
}

std::unique_ptr<Backend> make_backend(const BackendSettings& settings) {
    if (settings.kind == "http") {
        HttpBackendConfig http;
        http.base_url = settings.base_url;
        http.model_id = settings.model_id;
        http.timeout_s = settings.timeout_s;
        http.max_inflight = settings.max_inflight;
        http.retries = settings.retries;
        http.backoff_s = settings.backoff_s;
        if (const char* key = std::getenv("CROSSFLOW_API_KEY")) http.api_key = key;
        return std::make_unique<HttpBackend>(http);
    }
    auto mock = settings.fixture.empty()
                    ? std::make_unique<MockBackend>()
                    : std::make_unique<MockBackend>(MockBackend::from_fixture(settings.fixture));
    return mock;
}

std::vector<FlowConfig> build_flows(const ExperimentConfig& cfg,
                                    const std::vector<std::string>& only) {
    std::vector<FlowConfig> flows;

    if (!cfg.flows.presets.empty()) {
        std::vector<FlowConfig> presets = build_flow_presets(cfg.roster);
        std::vector<std::string> wanted = cfg.flows.presets;
        std::sort(wanted.begin(), wanted.end());
        for (FlowConfig& preset : presets) {
            if (std::binary_search(wanted.begin(), wanted.end(), preset.flow_id)) {
                flows.push_back(std::move(preset));
            }
        }
    }

    for (const CustomFlowConfig& custom : cfg.flows.custom) {
        FlowConfig flow;
        flow.flow_id = custom.flow_id;
        flow.context_policy = custom.context_policy;
        flow.retrieval_pathway = custom.retrieval_pathway;
        for (const AgentSpec& spec : cfg.roster) {
            if (!custom.agent_ids.empty() &&
                std::find(custom.agent_ids.begin(), custom.agent_ids.end(), spec.agent_id) ==
                    custom.agent_ids.end()) {
                continue;
            }
            AgentSpec copy = spec;
            copy.knowledge = custom.knowledge;
            flow.agents.push_back(std::move(copy));
        }
        flows.push_back(std::move(flow));
    }

    if (!only.empty()) {
        std::vector<FlowConfig> filtered;
        for (FlowConfig& flow : flows) {
            if (std::find(only.begin(), only.end(), flow.flow_id) != only.end()) {
                filtered.push_back(std::move(flow));
            }
        }
        flows = std::move(filtered);
    }
    if (flows.empty()) {
        throw ConfigError("flow selection matches no flows");
    }
    return flows;
}

IngestSummary cmd_ingest(const ExperimentConfig& cfg) {
    const std::unique_ptr<Embedder> embedder = make_embedder(cfg);
    fs::create_directories(indexes_dir(cfg));

    std::set<std::string> domains;
    for (const AgentSpec& spec : cfg.roster) domains.insert(spec.domain);

    IngestSummary summary;
    for (const std::string& domain : domains) {
        const fs::path dir = cfg.corpora_root / domain;
        if (!fs::is_directory(dir)) {
            throw ConfigError("missing corpus directory for domain '" + domain + "': " +
                              dir.string());
        }
        const std::vector<Document> docs = load_corpus(dir, domain);
        VectorStore store(embedder->dim());
        std::size_t chunk_count = 0;
        for (const Document& doc : docs) {
            for (Chunk& chunk : chunk_document(doc, cfg.chunk_size, cfg.chunk_overlap)) {
                store.insert(chunk, embedder->embed(chunk.text));
                ++chunk_count;
            }
        }
        if (store.empty()) {
            warn("domain '" + domain + "' produced an empty index (" + dir.string() + ")");
        }
        store.save(index_path(cfg, domain));
        summary.documents_per_domain[domain] = docs.size();
        summary.chunks_per_domain[domain] = chunk_count;
    }
    return summary;
}

namespace {

struct RunPair {
    const FlowConfig* flow;
    const QuestionItem* question;
};

std::string pair_key(const std::string& flow_id, const std::string& question_id) {
    return flow_id + "\x1f" + question_id;
}

/// Existing canonical lines keyed by (flow, question); unparseable lines are
/// fatal so a corrupt runs file never silently loses records.
std::map<std::string, std::string> read_existing_runs(const fs::path& path) {
    std::map<std::string, std::string> existing;
    std::ifstream in(path, std::ios::binary);
    if (!in) return existing;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json record = parse_json_line(line, path, lineno);
        if (!record.is_object() || !record.contains("flow_id") || !record.contains("question_id")) {
            throw IoError(path.string() + ":" + std::to_string(lineno) +
                          ": run record missing flow_id/question_id");
        }
        existing[pair_key(record["flow_id"].get<std::string>(),
                          record["question_id"].get<std::string>())] = line;
    }
    return existing;
}

RagRuntime load_rag_runtime(const ExperimentConfig& cfg, const std::vector<FlowConfig>& flows,
                            const Embedder& embedder, FallbackProvider* fallback) {
    RagRuntime runtime;
    runtime.embedder = &embedder;
    runtime.params = RagParams{cfg.retrieval.k, cfg.rag.tau_hi, cfg.rag.tau_lo};
    runtime.fallback = fallback;

    std::set<std::string> needed;
    for (const FlowConfig& flow : flows) {
        for (const AgentSpec& spec : flow.agents) {
            if (spec.knowledge == KnowledgeKind::LocalRag) needed.insert(spec.domain);
        }
    }
    for (const std::string& domain : needed) {
        const fs::path path = index_path(cfg, domain);
        if (!fs::is_regular_file(path)) {
            throw ConfigError("index for domain '" + domain + "' not found at " + path.string() +
                              "; run ingest first");
        }
        runtime.stores.emplace(domain, VectorStore::load(path));
    }
    return runtime;
}

std::unique_ptr<FallbackProvider> make_fallback(const ExperimentConfig& cfg) {
    constexpr std::string_view prefix = "fixture:";
    if (cfg.rag.fallback.starts_with(prefix)) {
        return std::make_unique<FixtureFallback>(
            FixtureFallback::from_file(fs::path(cfg.rag.fallback.substr(prefix.size()))));
    }
    return nullptr;
}

}  // namespace

RunSummary cmd_run(const ExperimentConfig& cfg, const std::vector<std::string>& flow_filter,
                   bool force) {
    const std::vector<QuestionItem> questions = load_questions(cfg.questions);
    if (questions.empty()) {
        throw ConfigError("question set is empty: " + cfg.questions.string());
    }
    const std::vector<FlowConfig> flows = build_flows(cfg, flow_filter);

    const std::unique_ptr<Embedder> embedder = make_embedder(cfg);
    const std::unique_ptr<FallbackProvider> fallback = make_fallback(cfg);
    const std::unique_ptr<Backend> backend = make_backend(cfg.backend);
    const RagRuntime rag = load_rag_runtime(cfg, flows, *embedder, fallback.get());

    fs::create_directories(cfg.output_dir);
    std::map<std::string, std::string> records = read_existing_runs(runs_path(cfg));

    std::vector<RunPair> worklist;
    RunSummary summary;
    for (const FlowConfig& flow : flows) {
        for (const QuestionItem& question : questions) {
            if (!force && records.contains(pair_key(flow.flow_id, question.question_id))) {
                ++summary.skipped;
                continue;
            }
            worklist.push_back(RunPair{&flow, &question});
        }
    }

    std::vector<std::string> canonical_lines(worklist.size());
    std::vector<std::string> full_lines(worklist.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;

    const std::size_t thread_count =
        std::min<std::size_t>(std::max(cfg.parallelism, 1), std::max<std::size_t>(worklist.size(), 1));
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= worklist.size()) return;
            try {
                const FlowRunRecord record =
                    run_flow(*worklist[i].flow, *worklist[i].question, rag, *backend);
                canonical_lines[i] = record.to_canonical_json().dump();
                full_lines[i] = record.to_full_json().dump();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (std::size_t i = 0; i < worklist.size(); ++i) {
        records[pair_key(worklist[i].flow->flow_id, worklist[i].question->question_id)] =
            canonical_lines[i];
        ++summary.executed;
    }

    // Rewrite in canonical order: configured flow order, then question order,
    // then any leftover records (from an older flow selection) sorted by key.
    std::set<std::string> written;
    std::ofstream out(runs_path(cfg), std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + runs_path(cfg).string());
    for (const FlowConfig& flow : build_flows(cfg)) {
        for (const QuestionItem& question : questions) {
            const std::string k = pair_key(flow.flow_id, question.question_id);
            auto it = records.find(k);
            if (it == records.end()) continue;
            out << it->second << '\n';
            written.insert(k);
        }
    }
    for (const auto& [k, line] : records) {
        if (!written.contains(k)) out << line << '\n';
    }
    out.flush();
    if (!out) throw IoError("failed writing " + runs_path(cfg).string());

    std::ofstream timings(timings_path(cfg), std::ios::binary | std::ios::app);
    for (const std::string& line : full_lines) {
        if (!line.empty()) timings << line << '\n';
    }
    return summary;
}

namespace {

void write_reports(const ExperimentConfig& cfg,
                   const std::map<std::string, FlowAverages>& averages) {
    const std::string csv = render_report_csv(averages);
    const std::string table = render_report_table(averages);

    std::ofstream csv_out(cfg.output_dir / "report.csv", std::ios::binary | std::ios::trunc);
    if (!csv_out) throw IoError("cannot write report.csv");
    csv_out << csv;

    std::ofstream table_out(cfg.output_dir / "report.txt", std::ios::binary | std::ios::trunc);
    if (!table_out) throw IoError("cannot write report.txt");
    table_out << table;
}

}  // namespace

EvaluateSummary cmd_evaluate(const ExperimentConfig& cfg) {
    const std::vector<QuestionItem> questions = load_questions(cfg.questions);
    std::map<std::string, const QuestionItem*> by_id;
    for (const QuestionItem& q : questions) by_id[q.question_id] = &q;

    const fs::path path = runs_path(cfg);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("no run records at " + path.string() + "; run the experiment first");
    }

    const std::unique_ptr<Embedder> embedder = make_embedder(cfg);

    EvaluateSummary summary;
    std::string line;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json record = parse_json_line(line, path, lineno);
        const std::string where = path.string() + ":" + std::to_string(lineno);

        const std::string flow_id = record.at("flow_id").get<std::string>();
        const std::string question_id = record.at("question_id").get<std::string>();
        if (!seen.insert(pair_key(flow_id, question_id)).second) {
            throw IoError(where + ": duplicate record for flow '" + flow_id + "', question '" +
                          question_id + "'");
        }
        if (record.at("failed").get<bool>()) {
            warn(where + ": skipping failed run (flow " + flow_id + ", question " + question_id +
                 ")");
            ++summary.skipped;
            continue;
        }
        auto it = by_id.find(question_id);
        if (it == by_id.end()) {
            warn(where + ": skipping record with no expected answer for question '" + question_id +
                 "'");
            ++summary.skipped;
            continue;
        }

        MetricRecord m;
        m.flow_id = flow_id;
        m.question_id = question_id;
        const std::string answer = record.at("final_answer").get<std::string>();
        m.rouge1 = rouge1(answer, it->second->expected_answer);
        m.cosine = cosine_answer_similarity(answer, it->second->expected_answer, *embedder);
        m.tokens_per_second = throughput(record.at("total_completion_tokens").get<long>(),
                                         record.at("backend_elapsed_s").get<double>());
        summary.records.push_back(std::move(m));
    }

    if (summary.records.empty()) {
        throw IoError("no scorable run records in " + path.string());
    }

    std::ofstream metrics_out(metrics_path(cfg), std::ios::binary | std::ios::trunc);
    if (!metrics_out) throw IoError("cannot write " + metrics_path(cfg).string());
    for (const MetricRecord& m : summary.records) {
        json j;
        j["flow_id"] = m.flow_id;
        j["question_id"] = m.question_id;
        j["rouge1_precision"] = m.rouge1.precision;
        j["rouge1_recall"] = m.rouge1.recall;
        j["rouge1_f1"] = m.rouge1.f1;
        j["cosine"] = m.cosine;
        j["tokens_per_second"] = m.tokens_per_second;
        metrics_out << j.dump() << '\n';
    }

    summary.averages = aggregate(summary.records);
    write_reports(cfg, summary.averages);
    return summary;
}

void cmd_report(const ExperimentConfig& cfg, std::ostream& out) {
    const fs::path path = metrics_path(cfg);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("no metrics at " + path.string() + "; run evaluate first");
    }

    std::vector<MetricRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json j = parse_json_line(line, path, lineno);
        MetricRecord m;
        m.flow_id = j.at("flow_id").get<std::string>();
        m.question_id = j.at("question_id").get<std::string>();
        m.rouge1.precision = j.at("rouge1_precision").get<double>();
        m.rouge1.recall = j.at("rouge1_recall").get<double>();
        m.rouge1.f1 = j.at("rouge1_f1").get<double>();
        m.cosine = j.at("cosine").get<double>();
        m.tokens_per_second = j.at("tokens_per_second").get<double>();
        records.push_back(std::move(m));
    }
    if (records.empty()) {
        throw IoError("metrics file is empty: " + path.string());
    }

    const std::map<std::string, FlowAverages> averages = aggregate(records);
    write_reports(cfg, averages);
    out << render_report_table(averages);
}

std::string render_report_csv(const std::map<std::string, FlowAverages>& averages) {
    std::vector<std::string> flow_ids;
    for (const auto& [id, _] : averages) flow_ids.push_back(id);
    std::sort(flow_ids.begin(), flow_ids.end(), flow_id_less);

    std::string out =
        "flow,avg_tokens_per_sec,avg_rouge1_precision,avg_rouge1_recall,avg_rouge1_f1,avg_cosine\n";
    for (const std::string& id : flow_ids) {
        const FlowAverages& a = averages.at(id);
        out += id + "," + format_fixed(a.tokens_per_second) + "," + format_fixed(a.precision) +
               "," + format_fixed(a.recall) + "," + format_fixed(a.f1) + "," +
               format_fixed(a.cosine) + "\n";
    }
    return out;
}

std::string render_report_table(const std::map<std::string, FlowAverages>& averages) {
    std::vector<std::string> flow_ids;
    for (const auto& [id, _] : averages) flow_ids.push_back(id);
    std::sort(flow_ids.begin(), flow_ids.end(), flow_id_less);

    const std::vector<std::string> headers = {"flow",          "tokens_per_sec", "rouge1_precision",
                                              "rouge1_recall", "rouge1_f1",      "cosine"};
    std::vector<std::vector<std::string>> rows;
    for (const std::string& id : flow_ids) {
        const FlowAverages& a = averages.at(id);
        rows.push_back({id, format_fixed(a.tokens_per_second), format_fixed(a.precision),
                        format_fixed(a.recall), format_fixed(a.f1), format_fixed(a.cosine)});
    }

    std::vector<std::size_t> widths(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        widths[c] = headers[c].size();
        for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
    }

    auto pad = [](const std::string& s, std::size_t width) {
        return std::string(width - s.size(), ' ') + s;
    };

    std::string out;
    for (std::size_t c = 0; c < headers.size(); ++c) {
        if (c > 0) out += "  ";
        out += pad(headers[c], widths[c]);
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += "  ";
            out += pad(row[c], widths[c]);
        }
        out += '\n';
    }
    out += "rouge1_f1 = 2PR/(P+R), derived from the precision/recall columns.\n";
    return out;
}

}  // namespace crossflow
