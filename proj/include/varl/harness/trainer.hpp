#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "json.hpp"
#include "varl/advisor/advisor.hpp"
#include "varl/advisor/trigger.hpp"
#include "varl/buffers/buffers.hpp"
#include "varl/envs/environment.hpp"
#include "varl/harness/config.hpp"
#include "varl/sac/agent.hpp"

namespace varl::harness {

/// Independent random streams derived from one run seed, so that consuming
/// one (for example sampling guidance) never shifts another.
enum class Stream : std::uint64_t {
    Instance = 1,
    Init,
    Env,
    Explore,
    Agent,
    Replay,
    Guidance,
    Advisor,
    Eval,
    Expert,
};

std::uint64_t derive_seed(std::uint64_t seed, Stream stream);
std::mt19937_64 make_stream(std::uint64_t seed, Stream stream);

struct EvalResult {
    double mean_return = 0.0;
    double success_rate = 0.0;
    double mean_length = 0.0;
};

/// What happened during one global step.
struct StepInfo {
    std::uint64_t step = 0;
    bool learned = false;  // gradient updates ran
    sac::CriticReport critic;
    double actor_loss = 0.0;
    double baseline_loss = 0.0;
    bool shaping_applied = false;
    std::size_t gate_active = 0;
    std::size_t gate_batch = 0;
    double shaping_loss = 0.0;
    double entropy = 0.0;
    std::size_t guidance_added = 0;
    bool episode_ended = false;

    bool operator==(const StepInfo&) const = default;
};

/// One line of the per-seed metrics log, written at every evaluation.
struct MetricsRecord {
    std::uint64_t step = 0;
    double eval_return = 0.0;
    double eval_success = 0.0;
    double eval_length = 0.0;
    std::optional<double> train_return;  // mean over training episodes since the last record
    std::uint64_t train_episodes = 0;
    double entropy = 0.0;
    double alpha = 0.0;
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double gate_rate = 0.0;     // active fraction over shaped updates since the last record
    double shaping_loss = 0.0;  // mean shaping term over updates since the last record
    std::uint64_t guidance_size = 0;
    std::uint64_t trigger_batches = 0;
    advisor::AdvisorCounters advisor;
    double oracle_return = 0.0;
    double wall_seconds = 0.0;

    bool operator==(const MetricsRecord&) const = default;
};

nlohmann::json metrics_to_json(const MetricsRecord& r);
MetricsRecord metrics_from_json(const nlohmann::json& j);

/// One seed of one experiment. Each call to step() performs one global step:
/// act, store the transition, fire any advisor trigger, update the critics,
/// update the actor (with the shaping term while active), move the targets.
///
/// Copies are complete and independent, so a run can be forked at any step.
class Trainer {
public:
    /// `advisor` overrides the one the configuration would build; it is
    /// ignored for the baselines, which never consult an advisor.
    Trainer(ExperimentConfig config, std::uint64_t seed, std::unique_ptr<advisor::Advisor> advisor = nullptr);

    Trainer(const Trainer& other);
    Trainer& operator=(const Trainer&) = delete;
    Trainer(Trainer&&) = default;

    StepInfo step();

    /// Steps until max_steps, recording metrics every eval_every steps.
    void run(const std::function<void(const MetricsRecord&)>& on_record = {});

    /// Deterministic-policy episodes on the fixed evaluation start states.
    EvalResult evaluate() const;

    /// Mean return of the oracle controller on the evaluation start states.
    double oracle_return() const { return oracle_return_; }

    /// Switches the shaping path on or off from the next step, keeping all
    /// other state. Used to fork a shaped run into a plain one.
    void set_algorithm(Algorithm algo) { config_.algorithm = algo; }

    std::uint64_t steps_done() const { return t_; }
    std::uint64_t seed() const { return seed_; }
    const ExperimentConfig& config() const { return config_; }
    const sac::SacAgent& agent() const { return agent_; }
    const buffers::ReplayBuffer& replay() const { return replay_; }
    const buffers::GuidanceBuffer& guidance() const { return guidance_; }
    const advisor::QueryLedger& ledger() const { return ledger_; }
    const advisor::TriggerSchedule& schedule() const { return schedule_; }
    const advisor::Advisor* advisor() const { return advisor_.get(); }
    const envs::Environment& env() const { return *env_; }
    const std::vector<MetricsRecord>& records() const { return records_; }

    /// Oracle episodes pushed into replay before training; returns how many
    /// of them ended in success.
    std::size_t prefill_expert(std::size_t episodes);

private:
    void start_episode();
    MetricsRecord make_record();

    ExperimentConfig config_;
    std::uint64_t seed_;
    advisor::TriggerSchedule schedule_;
    std::unique_ptr<envs::Environment> env_;
    std::unique_ptr<envs::Environment> eval_env_;
    sac::SacAgent agent_;
    buffers::ReplayBuffer replay_;
    buffers::GuidanceBuffer guidance_;
    std::unique_ptr<advisor::Advisor> advisor_;
    advisor::QueryLedger ledger_;

    std::mt19937_64 env_rng_;
    std::mt19937_64 explore_rng_;
    std::mt19937_64 agent_rng_;
    std::mt19937_64 replay_rng_;
    std::mt19937_64 guidance_rng_;

    std::vector<std::uint64_t> eval_seeds_;
    double oracle_return_ = 0.0;

    std::uint64_t t_ = 0;
    std::vector<double> state_;
    double episode_return_ = 0.0;

    // Accumulators between records.
    double window_train_return_ = 0.0;
    std::uint64_t window_episodes_ = 0;
    double window_critic_ = 0.0;
    double window_actor_ = 0.0;
    double window_entropy_ = 0.0;
    std::uint64_t window_updates_ = 0;
    std::uint64_t window_gate_active_ = 0;
    std::uint64_t window_gate_batch_ = 0;
    double window_shaping_ = 0.0;
    std::uint64_t window_shaped_ = 0;

    std::vector<MetricsRecord> records_;
    std::chrono::steady_clock::time_point started_;
};

/// Builds the advisor a configuration asks for (scripted or remote).
std::unique_ptr<advisor::Advisor> make_advisor(const ExperimentConfig& config, std::uint64_t seed);

}  // namespace varl::harness
