#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "crossflow/backend.hpp"
#include "crossflow/config.hpp"
#include "crossflow/metrics.hpp"

namespace crossflow {

/// Embedder selected by the config (hash by default, http when configured).
std::unique_ptr<Embedder> make_embedder(const ExperimentConfig& cfg);

/// Backend selected by the config. The http kind reads CROSSFLOW_API_KEY from
/// the environment.
std::unique_ptr<Backend> make_backend(const BackendSettings& settings);

/// Materializes the configured flows: presets first (ascending id), then
/// custom flows in file order, optionally filtered to the ids in `only`.
std::vector<FlowConfig> build_flows(const ExperimentConfig& cfg,
                                    const std::vector<std::string>& only = {});

struct IngestSummary {
    std::map<std::string, std::size_t> documents_per_domain;
    std::map<std::string, std::size_t> chunks_per_domain;
};

/// Builds one persisted index per roster domain under <output_dir>/indexes/.
/// Idempotent: re-ingesting replaces the files byte-identically under the
/// hash embedder. A roster domain without a corpus directory is an error
/// naming the domain.
IngestSummary cmd_ingest(const ExperimentConfig& cfg);

struct RunSummary {
    std::size_t executed = 0;
    std::size_t skipped = 0;  ///< records already present and not forced
};

/// Runs every selected (flow, question) pair, appending canonical records to
/// <output_dir>/runs.jsonl (one JSON record per line, wall-clock fields in
/// timings.jsonl). Existing records are skipped unless `force`; the file is
/// rewritten in canonical order so resumed and fresh runs produce identical
/// bytes. Pairs execute in parallel up to cfg.parallelism.
RunSummary cmd_run(const ExperimentConfig& cfg, const std::vector<std::string>& flow_filter = {},
                   bool force = false);

struct EvaluateSummary {
    std::vector<MetricRecord> records;
    std::map<std::string, FlowAverages> averages;
    std::size_t skipped = 0;  ///< failed runs or runs without a known question
};

/// Scores every run record against its question's expected answer and writes
/// metrics.jsonl, report.csv, and report.txt under the output directory.
EvaluateSummary cmd_evaluate(const ExperimentConfig& cfg);

/// Re-renders the report files from metrics.jsonl and streams the table.
void cmd_report(const ExperimentConfig& cfg, std::ostream& out);

/// The aligned report table (also written to report.txt).
std::string render_report_table(const std::map<std::string, FlowAverages>& averages);

/// The comma-separated report (also written to report.csv).
std::string render_report_csv(const std::map<std::string, FlowAverages>& averages);

}  // namespace crossflow
