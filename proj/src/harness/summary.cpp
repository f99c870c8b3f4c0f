#include "varl/harness/summary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "varl/envs/registry.hpp"
#include "varl/errors.hpp"
#include "varl/harness/experiment.hpp"

namespace varl::harness {

using nlohmann::json;

SeedCurve curve_from_records(std::uint64_t seed, const std::vector<MetricsRecord>& records) {
    SeedCurve c;
    c.seed = seed;
    for (const auto& r : records) {
        c.steps.push_back(r.step);
        c.success.push_back(r.eval_success);
        c.returns.push_back(r.eval_return);
        c.oracle_return = r.oracle_return;
    }
    return c;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
    if (window == 0) throw Error("moving_average: window must be positive");
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum += values[i];
        if (i >= window) sum -= values[i - window];
        out[i] = sum / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

ThresholdKind threshold_kind(envs::RewardRegime regime) {
    return regime == envs::RewardRegime::SparseEvent ? ThresholdKind::Success : ThresholdKind::Return;
}

std::optional<std::uint64_t> steps_to_threshold(const SeedCurve& curve, ThresholdKind kind,
                                                const ThresholdSettings& settings) {
    const auto& values = kind == ThresholdKind::Success ? curve.success : curve.returns;
    const double level = kind == ThresholdKind::Success ? settings.success
                                                        : settings.return_fraction * curve.oracle_return;
    const auto ma = moving_average(values, settings.window);
    // Only full windows count, so early luck of an untrained policy is not a
    // hit. A tiny slack keeps exact hits from being lost to summation rounding.
    for (std::size_t i = settings.window - 1; i < ma.size(); ++i) {
        if (ma[i] >= level - 1e-12) return curve.steps[i];
    }
    return std::nullopt;
}

namespace {

/// Latest value at or before `step`; the first value when none precedes it.
double value_at(const std::vector<std::uint64_t>& steps, const std::vector<double>& values, std::uint64_t step) {
    const auto it = std::upper_bound(steps.begin(), steps.end(), step);
    if (it == steps.begin()) return values.front();
    return values[static_cast<std::size_t>(it - steps.begin()) - 1];
}

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    sd = std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

Aggregate aggregate(const std::vector<SeedCurve>& curves, std::size_t window) {
    Aggregate out;
    if (curves.empty()) return out;
    for (const auto& c : curves) {
        if (c.steps.empty()) throw ValidationError("seed " + std::to_string(c.seed) + " has no evaluation records");
    }
    // The coarsest grid is the one with the fewest evaluation points.
    const SeedCurve* coarsest = &curves.front();
    for (const auto& c : curves) {
        if (c.steps != curves.front().steps) out.resampled = true;
        if (c.steps.size() < coarsest->steps.size()) coarsest = &c;
    }
    out.steps = coarsest->steps;
    std::vector<std::vector<double>> success, returns;
    for (const auto& c : curves) {
        const auto s = moving_average(c.success, window);
        const auto r = moving_average(c.returns, window);
        std::vector<double> s_on, r_on;
        for (const auto step : out.steps) {
            s_on.push_back(value_at(c.steps, s, step));
            r_on.push_back(value_at(c.steps, r, step));
        }
        success.push_back(std::move(s_on));
        returns.push_back(std::move(r_on));
    }
    for (std::size_t i = 0; i < out.steps.size(); ++i) {
        std::vector<double> s, r;
        for (std::size_t k = 0; k < curves.size(); ++k) {
            s.push_back(success[k][i]);
            r.push_back(returns[k][i]);
        }
        double m = 0.0, sd = 0.0;
        mean_std(s, m, sd);
        out.success_mean.push_back(m);
        out.success_std.push_back(sd);
        mean_std(r, m, sd);
        out.return_mean.push_back(m);
        out.return_std.push_back(sd);
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open metrics file " + path.string());
    std::vector<MetricsRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(metrics_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw ValidationError("malformed line in " + path.string() + ": " + e.what());
        }
    }
    return out;
}

RunSummary summarize_run(const std::filesystem::path& run_dir) {
    std::ifstream in(resolved_config_path(run_dir));
    if (!in) throw ValidationError("no resolved configuration in " + run_dir.string());
    const auto cfg = config_from_json(json::parse(in));
    RunSummary s;
    s.env = cfg.env;
    s.algorithm = algorithm_name(cfg.algorithm);
    s.max_steps = cfg.max_steps;
    s.kind = threshold_kind(envs::make_env(cfg.env, cfg.env_options)->spec().reward_regime);

    std::vector<SeedCurve> curves;
    std::vector<double> censored;
    for (const auto seed : cfg.seeds) {
        const auto path = metrics_path(run_dir, seed);
        if (!std::filesystem::exists(path)) {
            s.warnings.push_back("missing metrics for seed " + std::to_string(seed));
            continue;
        }
        const auto records = read_metrics(path);
        if (records.empty()) {
            s.warnings.push_back("no records for seed " + std::to_string(seed));
            continue;
        }
        curves.push_back(curve_from_records(seed, records));
        const auto& c = curves.back();
        const auto hit = steps_to_threshold(c, s.kind, cfg.threshold);
        s.seeds.push_back(seed);
        s.steps_to_threshold.push_back(hit);
        if (hit) ++s.reached;
        censored.push_back(static_cast<double>(hit ? *hit : cfg.max_steps));
        s.final_success.push_back(moving_average(c.success, cfg.threshold.window).back());
        s.final_return.push_back(moving_average(c.returns, cfg.threshold.window).back());
    }
    if (curves.empty()) throw ValidationError("no metrics found in " + run_dir.string());
    s.median_steps = median(censored);
    s.curves = aggregate(curves, cfg.threshold.window);
    if (s.curves.resampled) s.warnings.push_back("evaluation grids differ across seeds; resampled to the coarsest grid");
    return s;
}

json summary_to_json(const RunSummary& s) {
    json per_seed = json::array();
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        per_seed.push_back({
            {"seed", s.seeds[i]},
            {"steps_to_threshold", s.steps_to_threshold[i] ? json(*s.steps_to_threshold[i]) : json(nullptr)},
            {"final_success", s.final_success[i]},
            {"final_return", s.final_return[i]},
        });
    }
    return json{
        {"env", s.env},
        {"algorithm", s.algorithm},
        {"threshold_on", s.kind == ThresholdKind::Success ? "success" : "return"},
        {"max_steps", s.max_steps},
        {"seeds_reached", s.reached},
        {"median_steps_to_threshold", s.median_steps},
        {"per_seed", per_seed},
        {"curve",
         {{"step", s.curves.steps},
          {"success_mean", s.curves.success_mean},
          {"success_std", s.curves.success_std},
          {"return_mean", s.curves.return_mean},
          {"return_std", s.curves.return_std}}},
        {"warnings", s.warnings},
    };
}

}  // namespace varl::harness
