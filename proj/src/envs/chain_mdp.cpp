#include "varl/envs/chain_mdp.hpp"

#include <cmath>
#include <sstream>

#include "varl/errors.hpp"

namespace varl::envs {
namespace {

EnvSpec chain_spec(const ChainMDP::Options& o) {
    if (o.length < 2) throw ConfigError("ChainMDP: length must be at least 2");
    return EnvSpec{"ChainMDP", 1 + (o.onehot ? o.length : 0), DiscreteSpace{2, {"back", "forward"}},
                   o.max_episode_steps, RewardRegime::SparseEvent};
}

}  // namespace

ChainMDP::ChainMDP(Options options) : Environment(chain_spec(options)), options_(options) {}

std::unique_ptr<ChainMDP> ChainMDP::from_options(const EnvOptions& options) {
    reject_unknown_options(options, {"length", "max_episode_steps", "onehot"}, "ChainMDP");
    Options o;
    o.length = static_cast<std::size_t>(option_or(options, "length", static_cast<double>(o.length)));
    o.max_episode_steps = static_cast<std::size_t>(
        option_or(options, "max_episode_steps", static_cast<double>(2 * o.length)));
    o.onehot = option_or(options, "onehot", 0.0) != 0.0;
    return std::make_unique<ChainMDP>(o);
}

std::vector<double> ChainMDP::observe(std::size_t position) const {
    std::vector<double> s{static_cast<double>(position) / static_cast<double>(length() - 1)};
    if (options_.onehot) {
        s.resize(spec().state_dim, 0.0);
        s[1 + position] = 1.0;
    }
    return s;
}

std::size_t ChainMDP::decode(std::span<const double> state) const {
    const long idx = std::lround(state[0] * static_cast<double>(length() - 1));
    if (idx < 0) return 0;
    return std::min(static_cast<std::size_t>(idx), length() - 1);
}

std::vector<double> ChainMDP::on_reset(std::mt19937_64&) {
    position_ = 0;
    return observe(position_);
}

Environment::Outcome ChainMDP::on_step(const Action& action) {
    position_ = std::get<std::size_t>(action) == 1 ? position_ + 1 : 0;
    const bool reached = position_ == length() - 1;
    return {observe(position_), reached ? 1.0 : 0.0, reached};
}

Action ChainMDP::oracle_action(std::span<const double>) const { return std::size_t{1}; }

std::string ChainMDP::render_state(std::span<const double> state) const {
    std::ostringstream out;
    out << "state: " << format_vector(state.subspan(0, 1)) << '\n';
    out << "position: " << decode(state) << '\n';
    out << "goal_position: " << length() - 1;
    return out.str();
}

std::string ChainMDP::task_description() const {
    return "Walk along a chain of " + std::to_string(length()) +
           " states from position 0 to the last position. The forward action advances one position; the "
           "back action returns to position 0. A reward of 1 is given only on reaching the last position.";
}

std::unique_ptr<Environment> ChainMDP::clone() const { return std::make_unique<ChainMDP>(*this); }

}  // namespace varl::envs
