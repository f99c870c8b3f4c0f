#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "varl/advisor/trigger.hpp"
#include "varl/harness/config.hpp"
#include "varl/harness/trainer.hpp"

namespace varl::harness {

/// Files of a run directory.
std::filesystem::path metrics_path(const std::filesystem::path& dir, std::uint64_t seed);
std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::uint64_t seed);
std::filesystem::path ledger_path(const std::filesystem::path& dir, std::uint64_t seed);
std::filesystem::path resolved_config_path(const std::filesystem::path& dir);
std::filesystem::path input_config_path(const std::filesystem::path& dir);
std::filesystem::path summary_path(const std::filesystem::path& dir);

nlohmann::json ledger_to_json(const advisor::QueryLedger& ledger);
advisor::QueryLedger ledger_from_json(const nlohmann::json& j);

/// (trigger batches, common per-batch size, total samples queried).
struct LedgerReport {
    std::size_t batches = 0;
    std::optional<std::size_t> batch_size;  // absent with no batches or unequal batches
    std::size_t total = 0;
};

LedgerReport ledger_report(const advisor::QueryLedger& ledger);

/// "(3, 500, 1500)" or "(0, -, 0)".
std::string format_ledger_report(const LedgerReport& report);

/// Per-seed ledgers of a run directory.
std::vector<std::pair<std::uint64_t, advisor::QueryLedger>> read_ledgers(const std::filesystem::path& dir);

struct SeedOutcome {
    std::uint64_t seed = 0;
    std::vector<MetricsRecord> records;
    advisor::QueryLedger ledger;
};

/// Trains every configured seed and writes the run directory:
///   config.input.json      the configuration text exactly as given (if any)
///   config.resolved.json   every setting after defaults and overrides
///   metrics_seed<N>.jsonl  one record per evaluation
///   ledger_seed<N>.json    advisor trigger batches
///   checkpoint_seed<N>.txt final agent parameters
///   summary.json           cross-seed summary
/// Writes before training anything, so configuration errors leave nothing
/// half-trained.
/// Sweep configurations are rejected; see run_sweep.
std::vector<SeedOutcome> run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                        const std::optional<std::string>& input_text = std::nullopt,
                                        std::ostream* log = nullptr);

struct SweepOutcome {
    std::string label;
    ExperimentConfig config;
    std::vector<SeedOutcome> seeds;
};

/// Runs every variant of a sweep into `<out_dir>/<label>/`, after archiving
/// the input text and the base configuration at the top level. A
/// configuration without a sweep runs once, directly into `out_dir`.
std::vector<SweepOutcome> run_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                    const std::optional<std::string>& input_text = std::nullopt,
                                    std::ostream* log = nullptr);

}  // namespace varl::harness
