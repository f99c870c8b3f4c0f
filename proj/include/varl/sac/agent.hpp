#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "varl/buffers/buffers.hpp"
#include "varl/envs/spaces.hpp"
#include "varl/numerics/checkpoint.hpp"
#include "varl/numerics/dense_net.hpp"
#include "varl/numerics/optim.hpp"
#include "varl/sac/policy_head.hpp"

namespace varl::sac {

struct SacConfig {
    std::vector<std::size_t> hidden{64, 64};
    numerics::Activation activation = numerics::Activation::Tanh;
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    double alpha_lr = 3e-4;
    double gamma = 0.99;
    double tau = 0.005;
    double alpha = 0.2;
    bool auto_alpha = false;
    // Defaults to -dim(A) for boxes and 0.5 * log(n) for discrete spaces.
    std::optional<double> target_entropy;
    std::size_t batch_size = 64;
    double log_std_min = -5.0;
    double log_std_max = 2.0;

    bool operator==(const SacConfig&) const = default;
};

enum class ActMode { Stochastic, Deterministic };

struct PolicyDistribution {
    std::vector<double> probabilities;  // discrete
    head::GaussianParams gaussian;      // continuous, pre-squash
    bool discrete = true;

    double entropy() const;
};

/// A scalar loss and its gradient with respect to the actor parameters.
struct LossAndGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

struct CriticReport {
    double loss1 = 0.0;
    double loss2 = 0.0;
    double mean_target = 0.0;

    bool operator==(const CriticReport&) const = default;
};

/// Soft Actor-Critic with twin critics and Polyak-averaged target critics,
/// for either a discrete or a box action space.
///
/// Discrete critics map a state to all n action values. Box critics map
/// [state, unit action] to one value, where the unit action lies in [-1, 1]^d.
/// The agent holds no random state; every stochastic operation takes an
/// engine, so copies of an agent evolve identically under identical streams.
class SacAgent {
public:
    SacAgent(std::size_t state_dim, envs::ActionSpace space, SacConfig config, std::uint64_t seed);

    bool discrete() const { return discrete_; }
    std::size_t state_dim() const { return state_dim_; }
    /// n for discrete spaces, the box dimension otherwise.
    std::size_t action_size() const { return action_size_; }
    const envs::ActionSpace& action_space() const { return space_; }
    const SacConfig& config() const { return config_; }

    double alpha() const;
    double target_entropy() const;

    numerics::DenseNet& actor() { return actor_; }
    const numerics::DenseNet& actor() const { return actor_; }
    numerics::DenseNet& critic(int which) { return which == 0 ? critic1_ : critic2_; }
    const numerics::DenseNet& critic(int which) const { return which == 0 ? critic1_ : critic2_; }
    const numerics::DenseNet& target_critic(int which) const { return which == 0 ? target1_ : target2_; }
    const numerics::AdamState& actor_optimizer() const { return actor_opt_; }

    // --- critics ---------------------------------------------------------

    /// Q_which(s, a).
    double q_value(int which, std::span<const double> state, const envs::Action& action) const;

    /// min(Q1(s, a), Q2(s, a)).
    double min_q(std::span<const double> state, const envs::Action& action) const;

    /// Discrete only: min_q(s, a) for every action a.
    std::vector<double> min_q_all(std::span<const double> state) const;

    /// One soft TD step on both critics toward
    ///   y = r + gamma * (1 - terminal) * E_{a'~pi}[min Q_target(s', a') - alpha log pi(a'|s')].
    /// Truncated transitions bootstrap. Box targets draw one a' per sample
    /// from `rng`. Throws NumericError on a non-finite target.
    CriticReport critic_update(const std::vector<buffers::Transition>& batch, std::mt19937_64& rng);

    /// The TD targets y used by critic_update (same draws from `rng`).
    std::vector<double> critic_targets(const std::vector<buffers::Transition>& batch, std::mt19937_64& rng) const;

    /// 0.5 * mean (Q_which(s, a) - y)^2 and its gradient for that critic's
    /// parameters, with the targets held fixed.
    LossAndGrad critic_loss(int which, const std::vector<buffers::Transition>& batch,
                            const std::vector<double>& targets) const;

    /// target <- (1 - tau) target + tau online for both critics.
    void update_targets();

    // --- actor -----------------------------------------------------------

    PolicyDistribution policy(std::span<const double> state) const;

    envs::Action act(std::span<const double> state, ActMode mode, std::mt19937_64& rng) const;

    /// log pi(a | s); box actions use the squashed density.
    double log_prob(std::span<const double> state, const envs::Action& action) const;

    /// Baseline policy loss averaged over the rows of `states`.
    ///   discrete: sum_a pi(a|s) (alpha log pi(a|s) - Q(s, a))
    ///   box:      alpha log pi(a|s) - Q(s, a),  a = squash(mean + std * noise)
    /// with Q the twin-critic minimum. `noise` (box only) holds one standard
    /// normal row per state. Gradients are for the actor only.
    LossAndGrad baseline_policy_loss(const numerics::Matrix& states, const numerics::Matrix* noise = nullptr) const;

    /// Standard normal noise for baseline_policy_loss on box spaces.
    numerics::Matrix sample_noise(std::size_t rows, std::mt19937_64& rng) const;

    void apply_actor_gradient(std::span<const double> grad);

    /// Temperature step toward the target entropy; no-op unless auto_alpha.
    /// Returns the mean policy entropy over `states`.
    double update_alpha(const numerics::Matrix& states, const numerics::Matrix* noise = nullptr);

    // Building blocks for losses defined outside the agent (behaviour cloning).
    const numerics::Matrix& actor_forward(const numerics::Matrix& states, numerics::ForwardTape& tape) const;
    std::vector<double> actor_backward(const numerics::ForwardTape& tape, const numerics::Matrix& d_out) const;
    head::GaussianParams gaussian_row(std::span<const double> row) const;
    double box_log_scale() const { return box_log_scale_; }

    /// Box only: maps a unit-cube action to a box action.
    std::vector<double> to_box(std::span<const double> unit) const;

    // --- persistence -----------------------------------------------------

    numerics::TensorMap export_tensors() const;
    void import_tensors(const numerics::TensorMap& tensors);

    bool operator==(const SacAgent&) const = default;

private:
    std::vector<double> critic_input(std::span<const double> state, std::span<const double> unit_action) const;
    std::vector<double> unit_action(const envs::Action& action) const;

    std::size_t state_dim_;
    envs::ActionSpace space_;
    SacConfig config_;
    bool discrete_;
    std::size_t action_size_;
    double box_log_scale_ = 0.0;

    numerics::DenseNet actor_;
    numerics::DenseNet critic1_;
    numerics::DenseNet critic2_;
    numerics::DenseNet target1_;
    numerics::DenseNet target2_;
    numerics::AdamState actor_opt_;
    numerics::AdamState critic1_opt_;
    numerics::AdamState critic2_opt_;
    double log_alpha_;
    numerics::AdamState alpha_opt_;
};

}  // namespace varl::sac
