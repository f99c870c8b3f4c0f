#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "varl/advisor/advisor.hpp"
#include "varl/advisor/remote.hpp"
#include "varl/advisor/trigger.hpp"
#include "varl/envs/environment.hpp"
#include "varl/sac/agent.hpp"
#include "varl/shaping/shaping.hpp"

namespace varl::harness {

enum class Algorithm { Varl, Sac, SacExpertPrefill };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm algo);

struct AgentSettings {
    sac::SacConfig sac;
    std::size_t replay_capacity = 200000;
    std::uint64_t warmup_steps = 1000;  // uniform random actions before learning starts

    bool operator==(const AgentSettings&) const = default;
};

enum class AdvisorKind { Scripted, Remote };

struct AdvisorSettings {
    AdvisorKind kind = AdvisorKind::Scripted;
    std::size_t recent = 500;
    // Explicit trigger steps; when absent they are spread over the pre-cutoff
    // window at `trigger_fractions` of the cutoff.
    std::optional<std::vector<std::uint64_t>> trigger_steps;
    std::vector<double> trigger_fractions = advisor::kDefaultTriggerFractions;
    advisor::ScriptedQuality quality;
    advisor::RemoteConfig remote;

    bool operator==(const AdvisorSettings&) const = default;
};

struct ThresholdSettings {
    double success = 0.9;          // event-reward tasks: moving-average success
    double return_fraction = 0.9;  // distance-reward tasks: fraction of the oracle return
    std::size_t window = 10;       // moving-average window in evaluation points

    bool operator==(const ThresholdSettings&) const = default;
};

/// One parameter taking several values, each run as its own experiment.
/// Parameters: lambda, cutoff, kappa, recent, accuracy.
struct Sweep {
    std::string parameter;
    std::vector<double> values;

    bool operator==(const Sweep&) const = default;
};

struct ExperimentConfig {
    std::string env = "SparseGridWorld";
    envs::EnvOptions env_options;
    Algorithm algorithm = Algorithm::Varl;
    std::vector<std::uint64_t> seeds{0};
    std::uint64_t max_steps = 60000;
    std::uint64_t eval_every = 500;
    std::size_t eval_episodes = 10;
    std::string output_dir = "runs/default";
    AgentSettings agent;
    shaping::ShapingConfig shaping;
    AdvisorSettings advisor;
    std::size_t expert_episodes = 10;
    ThresholdSettings threshold;
    std::optional<Sweep> sweep;

    /// Throws ConfigError on any invalid or inconsistent value.
    void validate() const;

    /// The trigger steps this configuration resolves to.
    advisor::TriggerSchedule schedule() const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// The experiments a sweep expands to, labelled "<parameter>_<value>".
/// A configuration without a sweep expands to itself with an empty label.
std::vector<std::pair<std::string, ExperimentConfig>> expand_sweep(const ExperimentConfig& config);

/// Strict parse: unknown keys anywhere are rejected with their JSON path.
/// Missing keys keep their defaults. The result is validated.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Every field, including defaults and the resolved trigger steps.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace varl::harness
