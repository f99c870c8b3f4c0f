#pragma once

#include <array>

#include "varl/envs/environment.hpp"

namespace varl::envs {

/// Two-state, two-action continuing MDP with deterministic dynamics, used to
/// check critic convergence against an exact solution. Episodes only end by
/// truncation.
///
///   state 0: action 0 -> state 0 (r = 0),   action 1 -> state 1 (r = 0)
///   state 1: action 0 -> state 0 (r = 1),   action 1 -> state 1 (r = 0.2)
///
/// Observation: one-hot of the state.
class TinyMDP final : public Environment {
public:
    static constexpr std::array<std::array<std::size_t, 2>, 2> kNext{{{0, 1}, {0, 1}}};
    static constexpr std::array<std::array<double, 2>, 2> kReward{{{0.0, 0.0}, {1.0, 0.2}}};

    explicit TinyMDP(std::size_t max_episode_steps = 50);
    static std::unique_ptr<TinyMDP> from_options(const EnvOptions& options);

    std::size_t current() const { return state_; }
    static std::vector<double> observe(std::size_t s);

    Action oracle_action(std::span<const double> state) const override;
    std::string render_state(std::span<const double> state) const override;
    std::string task_description() const override;
    std::unique_ptr<Environment> clone() const override;

protected:
    std::vector<double> on_reset(std::mt19937_64& rng) override;
    Outcome on_step(const Action& action) override;

private:
    std::size_t state_ = 0;
};

}  // namespace varl::envs
