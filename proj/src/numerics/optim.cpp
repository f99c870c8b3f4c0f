#include "varl/numerics/optim.hpp"

#include <string>

#include "varl/errors.hpp"
#include "varl/numerics/kernels.hpp"

namespace varl::numerics {

AdamState::AdamState(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {
    if (!(config.learning_rate > 0.0) || !(config.epsilon > 0.0) || config.beta1 < 0.0 ||
        config.beta1 >= 1.0 || config.beta2 < 0.0 || config.beta2 >= 1.0) {
        throw ConfigError("invalid Adam hyperparameters");
    }
}

void AdamState::apply(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw DimensionError("Adam: expected " + std::to_string(m_.size()) + " parameters, got " +
                             std::to_string(params.size()) + " params / " + std::to_string(grads.size()) +
                             " grads");
    }
    require_finite(grads, "gradient");
    ++steps_;
    beta1_power_ *= config_.beta1;
    beta2_power_ *= config_.beta2;
    const kernels::AdamStep step{config_.learning_rate, config_.beta1,       config_.beta2,
                                 config_.epsilon,       1.0 - beta1_power_, 1.0 - beta2_power_};
    kernels::active().adam(params.data(), m_.data(), v_.data(), grads.data(), params.size(), step);
    require_finite(params, "parameters after update");
}

void apply_update(DenseNet& net, AdamState& state, std::span<const double> grads) {
    state.apply(net.parameters(), grads);
}

void polyak_update(DenseNet& target, const DenseNet& online, double tau) {
    if (!target.same_architecture(online)) throw DimensionError("polyak_update: architecture mismatch");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("polyak_update: tau must lie in (0, 1]");
    auto dst = target.parameters();
    auto src = online.parameters();
    kernels::active().lerp(dst.data(), src.data(), tau, dst.size());
}

}  // namespace varl::numerics
