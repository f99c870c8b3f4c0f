#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "varl/envs/spaces.hpp"

namespace varl::envs {

enum class RewardRegime { Dense, SparseEvent, Distance };

std::string reward_regime_name(RewardRegime regime);

struct EnvSpec {
    std::string name;
    std::size_t state_dim = 0;
    ActionSpace action_space;
    std::size_t max_episode_steps = 0;
    RewardRegime reward_regime = RewardRegime::SparseEvent;
};

struct StepResult {
    std::vector<double> next_state;
    double reward = 0.0;  // always in [0, 1]
    bool done = false;
    bool success = false;
    // Set when the episode ended only because max_episode_steps ran out;
    // critic targets bootstrap through these.
    bool truncated = false;

    bool terminal() const { return done && !truncated; }
};

/// Named numeric knobs for environment construction (grid size, chain
/// length, ...). Unknown names are rejected by each environment.
using EnvOptions = std::map<std::string, double>;

/// Episodic environment with sticky termination and timeout truncation.
/// Concrete environments implement on_reset/on_step; the base enforces the
/// action-space check, the step budget, and the unit-interval reward.
class Environment {
public:
    virtual ~Environment() = default;

    const EnvSpec& spec() const { return spec_; }

    /// Draws a fresh initial state; resets the step counter.
    std::vector<double> reset(std::uint64_t seed);

    /// Throws ValidationError for out-of-space actions and Error when called
    /// after the episode has ended or before reset.
    StepResult step(const Action& action);

    std::size_t elapsed_steps() const { return steps_; }
    bool episode_done() const { return done_; }

    /// Ground-truth controller used by scripted advisors and expert prefill.
    virtual Action oracle_action(std::span<const double> state) const = 0;

    /// Text rendering of a state for advisor prompts: the raw vector at fixed
    /// precision followed by named semantic fields.
    virtual std::string render_state(std::span<const double> state) const = 0;

    virtual std::string task_description() const = 0;

    virtual std::unique_ptr<Environment> clone() const = 0;

protected:
    explicit Environment(EnvSpec spec);

    struct Outcome {
        std::vector<double> state;
        double reward = 0.0;
        bool success = false;
    };

    virtual std::vector<double> on_reset(std::mt19937_64& rng) = 0;
    virtual Outcome on_step(const Action& action) = 0;

private:
    EnvSpec spec_;
    std::size_t steps_ = 0;
    bool done_ = true;
    bool started_ = false;
    std::mt19937_64 rng_;
};

/// Reads an option with a default; used by environment constructors.
double option_or(const EnvOptions& options, const std::string& key, double fallback);

/// Throws ConfigError if `options` contains a key outside `allowed`.
void reject_unknown_options(const EnvOptions& options, std::initializer_list<const char*> allowed,
                            const std::string& env_name);

}  // namespace varl::envs
