#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "varl/buffers/buffers.hpp"
#include "varl/numerics/matrix.hpp"
#include "varl/sac/agent.hpp"

namespace varl::shaping {

struct ShapingConfig {
    double lambda = 10.0;
    // Last global step at which the behaviour-cloning term is applied.
    std::uint64_t cutoff = 6000;
    double kappa = 1.0;
    std::size_t guidance_batch = 64;

    /// Throws ConfigError on out-of-range values.
    void validate() const;

    bool operator==(const ShapingConfig&) const = default;
};

struct GateResult {
    bool active = false;
    // Discrete: lowest-index critic-greedy action. Box: unused.
    std::size_t greedy_action = 0;
    // Box: squared Mahalanobis distance in pre-squash space. Discrete: unused.
    double distance = 0.0;
};

/// Active unless `advice` attains the maximum of the twin-critic minimum at
/// `state` (any tied maximiser counts).
GateResult gate_discrete(const sac::SacAgent& agent, std::span<const double> state, std::size_t advice);

/// Active when sum_d ((u_d - mean_d) / std_d)^2 > kappa^2, with u the
/// pre-squash image of the box action `advice`.
GateResult gate_continuous(const sac::SacAgent& agent, std::span<const double> state,
                           std::span<const double> advice, double kappa);

/// Gate for a stored pair, using its cached pre-squash action for boxes.
GateResult gate(const sac::SacAgent& agent, const buffers::GuidancePair& pair, double kappa);

/// Gates for a whole batch in one pass over the networks; agrees with gate().
std::vector<GateResult> gate_batch(const sac::SacAgent& agent, const std::vector<buffers::GuidancePair>& pairs,
                                   double kappa);

/// -log pi(advice | state) for one pair; box densities include the squash
/// and box-scale corrections.
double negative_log_prob(const sac::SacAgent& agent, const buffers::GuidancePair& pair);

/// Mean of -log pi(a | s) over the batch, with actor gradients.
sac::LossAndGrad bc_loss(const sac::SacAgent& agent, const std::vector<buffers::GuidancePair>& pairs);

struct ShapingResult {
    sac::LossAndGrad term;
    std::size_t active = 0;
    std::size_t batch = 0;

    double gate_rate() const { return batch == 0 ? 0.0 : static_cast<double>(active) / static_cast<double>(batch); }
};

/// lambda * sum_i g_i * (-log pi(a_i | s_i)) / batch. Gates are evaluated on
/// the current networks and treated as constants.
ShapingResult shaping_loss(const sac::SacAgent& agent, const ShapingConfig& config,
                           const std::vector<buffers::GuidancePair>& pairs);

struct ActorLoss {
    sac::LossAndGrad total;
    double baseline_loss = 0.0;
    bool shaping_applied = false;
    ShapingResult shaping;
};

/// Baseline policy loss plus the shaping term while step <= cutoff. Past the
/// cutoff, or with no guidance, `total` is exactly the baseline result.
ActorLoss actor_loss(const sac::SacAgent& agent, const ShapingConfig& config, std::uint64_t step,
                     const numerics::Matrix& states, const numerics::Matrix* noise,
                     const std::vector<buffers::GuidancePair>& pairs);

}  // namespace varl::shaping
