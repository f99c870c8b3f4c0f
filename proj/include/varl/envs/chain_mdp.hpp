#pragma once

#include "varl/envs/environment.hpp"

namespace varl::envs {

/// Hard-exploration chain of `length` states. Action 1 ("forward") advances
/// one state, action 0 ("back") returns to state 0. Entering the last state
/// ends the episode with reward 1; nothing else is rewarded. Episodes always
/// start in state 0.
///
/// Observation: [i / (length - 1)], optionally followed by a one-hot of i.
class ChainMDP final : public Environment {
public:
    struct Options {
        std::size_t length = 25;
        std::size_t max_episode_steps = 50;
        bool onehot = false;
    };

    explicit ChainMDP(Options options);
    static std::unique_ptr<ChainMDP> from_options(const EnvOptions& options);

    std::size_t length() const { return options_.length; }
    std::size_t position() const { return position_; }

    std::vector<double> observe(std::size_t position) const;
    std::size_t decode(std::span<const double> state) const;

    Action oracle_action(std::span<const double> state) const override;
    std::string render_state(std::span<const double> state) const override;
    std::string task_description() const override;
    std::unique_ptr<Environment> clone() const override;

protected:
    std::vector<double> on_reset(std::mt19937_64& rng) override;
    Outcome on_step(const Action& action) override;

private:
    Options options_;
    std::size_t position_ = 0;
};

}  // namespace varl::envs
