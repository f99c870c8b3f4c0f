#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "varl/envs/environment.hpp"
#include "varl/harness/trainer.hpp"

namespace varl::harness {

/// Evaluation curve of one seed.
struct SeedCurve {
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> steps;
    std::vector<double> success;
    std::vector<double> returns;
    double oracle_return = 0.0;
};

SeedCurve curve_from_records(std::uint64_t seed, const std::vector<MetricsRecord>& records);

/// Trailing moving average; the first entries average over what is available.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

enum class ThresholdKind { Success, Return };

/// Event-reward tasks are judged on success, distance-reward tasks on return.
ThresholdKind threshold_kind(envs::RewardRegime regime);

/// First evaluation step at which the moving average reaches the threshold:
/// `settings.success` for success curves, `settings.return_fraction` times
/// the oracle return for return curves. Only points with a full window of
/// history are eligible. nullopt when none reaches it.
std::optional<std::uint64_t> steps_to_threshold(const SeedCurve& curve, ThresholdKind kind,
                                                const ThresholdSettings& settings);

/// Cross-seed statistics on a common evaluation grid.
struct Aggregate {
    std::vector<std::uint64_t> steps;
    std::vector<double> success_mean, success_std;  // of the moving-averaged curves
    std::vector<double> return_mean, return_std;
    bool resampled = false;  // seeds disagreed on the grid; all were mapped onto the coarsest
};

/// Mean and population standard deviation across seeds after smoothing each
/// seed with moving_average(window). Mismatched grids are resampled onto the
/// coarsest one by taking each seed's latest value at or before every step.
Aggregate aggregate(const std::vector<SeedCurve>& curves, std::size_t window);

double median(std::vector<double> values);

struct RunSummary {
    std::string env;
    std::string algorithm;
    ThresholdKind kind = ThresholdKind::Success;
    std::uint64_t max_steps = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<std::optional<std::uint64_t>> steps_to_threshold;
    // Steps-to-threshold with seeds that never reach it counted at max_steps.
    double median_steps = 0.0;
    std::size_t reached = 0;
    std::vector<double> final_success;  // last moving-average value per seed
    std::vector<double> final_return;
    Aggregate curves;
    std::vector<std::string> warnings;
};

/// Summarises a run directory written by run_experiment.
RunSummary summarize_run(const std::filesystem::path& run_dir);

nlohmann::json summary_to_json(const RunSummary& s);

/// Reads one metrics jsonl file.
std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path);

}  // namespace varl::harness
