#include "varl/envs/environment.hpp"

#include <algorithm>
#include <cmath>

#include "varl/errors.hpp"

namespace varl::envs {

std::string reward_regime_name(RewardRegime regime) {
    switch (regime) {
        case RewardRegime::Dense: return "dense";
        case RewardRegime::SparseEvent: return "sparse-event";
        case RewardRegime::Distance: return "distance";
    }
    return "dense";
}

Environment::Environment(EnvSpec spec) : spec_(std::move(spec)) {
    validate_space(spec_.action_space);
    if (spec_.state_dim == 0) throw ConfigError(spec_.name + ": state_dim must be positive");
    if (spec_.max_episode_steps == 0) throw ConfigError(spec_.name + ": max_episode_steps must be positive");
}

std::vector<double> Environment::reset(std::uint64_t seed) {
    rng_.seed(seed);
    steps_ = 0;
    done_ = false;
    started_ = true;
    return on_reset(rng_);
}

StepResult Environment::step(const Action& action) {
    if (!started_) throw Error(spec_.name + ": step called before reset");
    if (done_) throw Error(spec_.name + ": step called after the episode ended");
    require_contains(spec_.action_space, action);
    Outcome outcome = on_step(action);
    ++steps_;
    if (!(outcome.reward >= 0.0 && outcome.reward <= 1.0)) {
        throw NumericError(spec_.name + ": reward outside [0, 1]");
    }
    StepResult result;
    result.next_state = std::move(outcome.state);
    result.reward = outcome.reward;
    result.success = outcome.success;
    if (outcome.success) {
        result.done = true;
    } else if (steps_ >= spec_.max_episode_steps) {
        result.done = true;
        result.truncated = true;
    }
    done_ = result.done;
    return result;
}

double option_or(const EnvOptions& options, const std::string& key, double fallback) {
    const auto it = options.find(key);
    return it == options.end() ? fallback : it->second;
}

void reject_unknown_options(const EnvOptions& options, std::initializer_list<const char*> allowed,
                            const std::string& env_name) {
    for (const auto& [key, value] : options) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!known) throw ConfigError(env_name + ": unknown option '" + key + "'");
        if (!std::isfinite(value)) throw ConfigError(env_name + ": option '" + key + "' is not finite");
    }
}

}  // namespace varl::envs
