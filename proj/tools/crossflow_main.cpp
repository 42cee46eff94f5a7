#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossflow/config.hpp"
#include "crossflow/errors.hpp"
#include "crossflow/experiment.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& value) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crossflow: multi-agent workflow benchmark harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string flows_csv;
    bool force = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file")->required();
        cmd->add_option("--out", out_override, "override the configured output directory");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "build one vector index per domain");
    add_common(ingest);

    CLI::App* run = app.add_subcommand("run", "execute the (flow x question) runs");
    add_common(run);
    run->add_option("--flows", flows_csv, "comma-separated flow ids to run, e.g. 1,3");
    run->add_flag("--force", force, "re-run pairs that already have records");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score run records and write reports");
    add_common(evaluate);

    CLI::App* report = app.add_subcommand("report", "re-render reports from metrics.jsonl");
    add_common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    crossflow::ExperimentConfig cfg;
    try {
        cfg = crossflow::ExperimentConfig::from_file(config_path);
        if (!out_override.empty()) cfg.output_dir = out_override;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (ingest->parsed()) {
            const crossflow::IngestSummary summary = crossflow::cmd_ingest(cfg);
            for (const auto& [domain, chunks] : summary.chunks_per_domain) {
                std::cout << "ingested domain " << domain << ": "
                          << summary.documents_per_domain.at(domain) << " documents, " << chunks
                          << " chunks\n";
            }
        } else if (run->parsed()) {
            const crossflow::RunSummary summary =
                crossflow::cmd_run(cfg, split_csv(flows_csv), force);
            std::cout << "executed " << summary.executed << " runs, skipped " << summary.skipped
                      << " existing\n";
        } else if (evaluate->parsed()) {
            const crossflow::EvaluateSummary summary = crossflow::cmd_evaluate(cfg);
            if (summary.skipped > 0) {
                std::cout << "skipped " << summary.skipped << " unscorable records\n";
            }
            std::cout << crossflow::render_report_table(summary.averages);
        } else if (report->parsed()) {
            crossflow::cmd_report(cfg, std::cout);
        }
        return 0;
    } catch (const crossflow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const crossflow::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
