#include "varl/harness/experiment.hpp"

#include <fstream>
#include <ostream>
#include <regex>

#include "varl/errors.hpp"
#include "varl/harness/summary.hpp"
#include "varl/numerics/checkpoint.hpp"

namespace varl::harness {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path metrics_path(const fs::path& dir, std::uint64_t seed) {
    return dir / ("metrics_seed" + std::to_string(seed) + ".jsonl");
}
fs::path checkpoint_path(const fs::path& dir, std::uint64_t seed) {
    return dir / ("checkpoint_seed" + std::to_string(seed) + ".txt");
}
fs::path ledger_path(const fs::path& dir, std::uint64_t seed) {
    return dir / ("ledger_seed" + std::to_string(seed) + ".json");
}
fs::path resolved_config_path(const fs::path& dir) { return dir / "config.resolved.json"; }
fs::path input_config_path(const fs::path& dir) { return dir / "config.input.json"; }
fs::path summary_path(const fs::path& dir) { return dir / "summary.json"; }

json ledger_to_json(const advisor::QueryLedger& ledger) {
    json batches = json::array();
    for (const auto& b : ledger.batches) {
        batches.push_back({{"step", b.step},
                           {"requested", b.requested},
                           {"added", b.added},
                           {"parse_failures", b.parse_failures},
                           {"transport_failures", b.transport_failures},
                           {"rejected", b.rejected}});
    }
    const auto report = ledger_report(ledger);
    return json{{"trigger_batches", report.batches},
                {"batch_size", report.batch_size ? json(*report.batch_size) : json(nullptr)},
                {"total_requested", report.total},
                {"total_added", ledger.total_added()},
                {"batches", batches}};
}

advisor::QueryLedger ledger_from_json(const json& j) {
    advisor::QueryLedger ledger;
    try {
        for (const auto& b : j.at("batches")) {
            advisor::TriggerRecord r;
            r.step = b.at("step").get<std::uint64_t>();
            r.requested = b.at("requested").get<std::size_t>();
            r.added = b.at("added").get<std::size_t>();
            r.parse_failures = b.value("parse_failures", std::size_t{0});
            r.transport_failures = b.value("transport_failures", std::size_t{0});
            r.rejected = b.value("rejected", std::size_t{0});
            ledger.batches.push_back(r);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed ledger: ") + e.what());
    }
    return ledger;
}

LedgerReport ledger_report(const advisor::QueryLedger& ledger) {
    LedgerReport r;
    r.batches = ledger.trigger_batches();
    r.total = ledger.total_requested();
    if (const auto size = ledger.uniform_batch_size(); size > 0) r.batch_size = size;
    return r;
}

std::string format_ledger_report(const LedgerReport& report) {
    return "(" + std::to_string(report.batches) + ", " +
           (report.batch_size ? std::to_string(*report.batch_size) : std::string("-")) + ", " +
           std::to_string(report.total) + ")";
}

std::vector<std::pair<std::uint64_t, advisor::QueryLedger>> read_ledgers(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError("not a run directory: " + dir.string());
    static const std::regex name(R"(ledger_seed(\d+)\.json)");
    std::vector<std::pair<std::uint64_t, advisor::QueryLedger>> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string file = entry.path().filename().string();
        if (!std::regex_match(file, m, name)) continue;
        std::ifstream in(entry.path());
        out.emplace_back(std::stoull(m[1].str()), ledger_from_json(json::parse(in)));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::vector<SeedOutcome> run_experiment(const ExperimentConfig& config, const fs::path& out_dir,
                                        const std::optional<std::string>& input_text, std::ostream* log) {
    config.validate();
    if (config.sweep) throw ConfigError("run_experiment: expand the sweep first (run_sweep)");
    fs::create_directories(out_dir);
    if (input_text) write_text(input_config_path(out_dir), *input_text);
    write_text(resolved_config_path(out_dir), config_to_json(config).dump(2) + "\n");

    std::vector<SeedOutcome> outcomes;
    for (const auto seed : config.seeds) {
        Trainer trainer(config, seed);
        std::ofstream metrics(metrics_path(out_dir, seed));
        if (!metrics) throw Error("cannot write metrics for seed " + std::to_string(seed));
        trainer.run([&](const MetricsRecord& r) {
            metrics << metrics_to_json(r).dump() << '\n';
            metrics.flush();
            if (log) {
                *log << "seed " << seed << " step " << r.step << " success " << r.eval_success << " return "
                     << r.eval_return << " guidance " << r.guidance_size << '\n';
            }
        });
        numerics::save_checkpoint(checkpoint_path(out_dir, seed), trainer.agent().export_tensors());
        write_text(ledger_path(out_dir, seed), ledger_to_json(trainer.ledger()).dump(2) + "\n");
        outcomes.push_back({seed, trainer.records(), trainer.ledger()});
    }
    write_text(summary_path(out_dir), summary_to_json(summarize_run(out_dir)).dump(2) + "\n");
    return outcomes;
}

std::vector<SweepOutcome> run_sweep(const ExperimentConfig& config, const fs::path& out_dir,
                                    const std::optional<std::string>& input_text, std::ostream* log) {
    config.validate();
    if (!config.sweep) return {{"", config, run_experiment(config, out_dir, input_text, log)}};
    fs::create_directories(out_dir);
    if (input_text) write_text(input_config_path(out_dir), *input_text);
    write_text(resolved_config_path(out_dir), config_to_json(config).dump(2) + "\n");
    std::vector<SweepOutcome> out;
    for (auto& [label, variant] : expand_sweep(config)) {
        if (log) *log << "sweep variant " << label << '\n';
        variant.output_dir = (out_dir / label).string();
        auto seeds = run_experiment(variant, out_dir / label, std::nullopt, log);
        out.push_back({label, std::move(variant), std::move(seeds)});
    }
    return out;
}

}  // namespace varl::harness
