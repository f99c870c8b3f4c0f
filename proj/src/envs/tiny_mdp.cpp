#include "varl/envs/tiny_mdp.hpp"

#include <sstream>

namespace varl::envs {

TinyMDP::TinyMDP(std::size_t max_episode_steps)
    : Environment(EnvSpec{"TinyMDP", 2, DiscreteSpace{2, {"go_to_0", "go_to_1"}}, max_episode_steps,
                          RewardRegime::Dense}) {}

std::unique_ptr<TinyMDP> TinyMDP::from_options(const EnvOptions& options) {
    reject_unknown_options(options, {"max_episode_steps"}, "TinyMDP");
    return std::make_unique<TinyMDP>(static_cast<std::size_t>(option_or(options, "max_episode_steps", 50.0)));
}

std::vector<double> TinyMDP::observe(std::size_t s) { return s == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0}; }

std::vector<double> TinyMDP::on_reset(std::mt19937_64&) {
    state_ = 0;
    return observe(state_);
}

Environment::Outcome TinyMDP::on_step(const Action& action) {
    const std::size_t a = std::get<std::size_t>(action);
    const double r = kReward[state_][a];
    state_ = kNext[state_][a];
    return {observe(state_), r, false};
}

// Optimal for any discount above roughly 0.2: shuttle 0 -> 1 -> 0 collecting r = 1.
Action TinyMDP::oracle_action(std::span<const double> state) const {
    return state[0] > 0.5 ? std::size_t{1} : std::size_t{0};
}

std::string TinyMDP::render_state(std::span<const double> state) const {
    std::ostringstream out;
    out << "state: " << format_vector(state) << '\n';
    out << "index: " << (state[0] > 0.5 ? 0 : 1);
    return out.str();
}

std::string TinyMDP::task_description() const {
    return "Two-state decision process. Collect as much discounted reward as possible.";
}

std::unique_ptr<Environment> TinyMDP::clone() const { return std::make_unique<TinyMDP>(*this); }

}  // namespace varl::envs
