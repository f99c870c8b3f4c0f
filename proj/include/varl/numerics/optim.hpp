#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "varl/numerics/dense_net.hpp"

namespace varl::numerics {

struct AdamConfig {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    bool operator==(const AdamConfig&) const = default;
};

/// Adaptive-moment accumulators for one parameter vector.
class AdamState {
public:
    AdamState() = default;
    AdamState(std::size_t parameter_count, AdamConfig config);

    /// One optimizer step. Throws NumericError on non-finite gradients or if
    /// the step would leave a non-finite parameter behind.
    void apply(std::span<double> params, std::span<const double> grads);

    std::uint64_t step_count() const { return steps_; }
    std::size_t size() const { return m_.size(); }
    const AdamConfig& config() const { return config_; }
    std::span<const double> first_moment() const { return m_; }
    std::span<const double> second_moment() const { return v_; }

    bool operator==(const AdamState&) const = default;

private:
    AdamConfig config_{};
    std::uint64_t steps_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
    // Running beta^t products, kept incrementally so the bias correction is
    // exact for every step count.
    double beta1_power_ = 1.0;
    double beta2_power_ = 1.0;
};

void apply_update(DenseNet& net, AdamState& state, std::span<const double> grads);

/// target <- (1 - tau) * target + tau * online, elementwise.
void polyak_update(DenseNet& target, const DenseNet& online, double tau);

}  // namespace varl::numerics
