#include "varl/sac/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varl/errors.hpp"

namespace varl::sac {

using numerics::DenseNet;
using numerics::ForwardTape;
using numerics::Matrix;

namespace {

std::vector<std::size_t> layer_sizes(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
    std::vector<std::size_t> sizes{in};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

void require_finite_scalar(double v, const char* what) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + what);
}

}  // namespace

double PolicyDistribution::entropy() const {
    return discrete ? head::categorical_entropy(probabilities) : head::gaussian_entropy(gaussian);
}

SacAgent::SacAgent(std::size_t state_dim, envs::ActionSpace space, SacConfig config, std::uint64_t seed)
    : state_dim_(state_dim),
      space_(std::move(space)),
      config_(std::move(config)),
      discrete_(envs::is_discrete(space_)),
      action_size_(discrete_ ? std::get<envs::DiscreteSpace>(space_).n : std::get<envs::BoxSpace>(space_).dim()) {
    envs::validate_space(space_);
    if (state_dim_ == 0) throw ConfigError("state_dim must be positive");
    if (!(config_.gamma > 0.0 && config_.gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
    if (!(config_.tau > 0.0 && config_.tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
    if (!(config_.alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (config_.batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(config_.log_std_min < config_.log_std_max)) throw ConfigError("log_std_min must be below log_std_max");

    std::mt19937_64 rng(seed);
    if (discrete_) {
        actor_ = DenseNet(layer_sizes(state_dim_, config_.hidden, action_size_), config_.activation, rng);
        critic1_ = DenseNet(layer_sizes(state_dim_, config_.hidden, action_size_), config_.activation, rng);
        critic2_ = DenseNet(layer_sizes(state_dim_, config_.hidden, action_size_), config_.activation, rng);
    } else {
        const auto& box = std::get<envs::BoxSpace>(space_);
        box_log_scale_ = head::box_log_scale(box.low, box.high);
        actor_ = DenseNet(layer_sizes(state_dim_, config_.hidden, 2 * action_size_), config_.activation, rng);
        critic1_ = DenseNet(layer_sizes(state_dim_ + action_size_, config_.hidden, 1), config_.activation, rng);
        critic2_ = DenseNet(layer_sizes(state_dim_ + action_size_, config_.hidden, 1), config_.activation, rng);
    }
    target1_ = critic1_;
    target2_ = critic2_;
    actor_opt_ = numerics::AdamState(actor_.parameters().size(), {config_.actor_lr});
    critic1_opt_ = numerics::AdamState(critic1_.parameters().size(), {config_.critic_lr});
    critic2_opt_ = numerics::AdamState(critic2_.parameters().size(), {config_.critic_lr});
    log_alpha_ = std::log(config_.alpha);
    alpha_opt_ = numerics::AdamState(1, {config_.alpha_lr});
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

double SacAgent::target_entropy() const {
    if (config_.target_entropy) return *config_.target_entropy;
    return discrete_ ? 0.5 * std::log(static_cast<double>(action_size_)) : -static_cast<double>(action_size_);
}

std::vector<double> SacAgent::unit_action(const envs::Action& action) const {
    const auto& box = std::get<envs::BoxSpace>(space_);
    return envs::to_unit(box, std::get<std::vector<double>>(action));
}

std::vector<double> SacAgent::to_box(std::span<const double> unit) const {
    return envs::from_unit(std::get<envs::BoxSpace>(space_), unit);
}

std::vector<double> SacAgent::critic_input(std::span<const double> state, std::span<const double> unit) const {
    std::vector<double> x(state.begin(), state.end());
    x.insert(x.end(), unit.begin(), unit.end());
    return x;
}

head::GaussianParams SacAgent::gaussian_row(std::span<const double> row) const {
    return head::split_gaussian(row, action_size_, config_.log_std_min, config_.log_std_max);
}

// --- critics -----------------------------------------------------------------

double SacAgent::q_value(int which, std::span<const double> state, const envs::Action& action) const {
    envs::require_contains(space_, action);
    const DenseNet& net = critic(which);
    if (discrete_) return net.forward(state)[std::get<std::size_t>(action)];
    return net.forward(critic_input(state, unit_action(action)))[0];
}

double SacAgent::min_q(std::span<const double> state, const envs::Action& action) const {
    return std::min(q_value(0, state, action), q_value(1, state, action));
}

std::vector<double> SacAgent::min_q_all(std::span<const double> state) const {
    if (!discrete_) throw Error("min_q_all requires a discrete action space");
    auto q1 = critic1_.forward(state);
    const auto q2 = critic2_.forward(state);
    for (std::size_t a = 0; a < q1.size(); ++a) q1[a] = std::min(q1[a], q2[a]);
    return q1;
}

std::vector<double> SacAgent::critic_targets(const std::vector<buffers::Transition>& batch,
                                             std::mt19937_64& rng) const {
    if (batch.empty()) throw Error("critic_targets: empty batch");
    const std::size_t n = batch.size();
    const double alpha_now = alpha();

    Matrix next_states(n, state_dim_);
    for (std::size_t b = 0; b < n; ++b) std::copy(batch[b].next_state.begin(), batch[b].next_state.end(), next_states.row(b).begin());

    std::vector<double> targets(n);
    ForwardTape actor_tape;
    const Matrix& next_out = actor_.forward_batch(next_states, actor_tape);

    if (discrete_) {
        ForwardTape t1, t2;
        const Matrix& qt1 = target1_.forward_batch(next_states, t1);
        const Matrix& qt2 = target2_.forward_batch(next_states, t2);
        for (std::size_t b = 0; b < n; ++b) {
            const auto logp = head::log_softmax(next_out.row(b));
            double v = 0.0;
            for (std::size_t a = 0; a < action_size_; ++a) {
                const double p = std::exp(logp[a]);
                v += p * (std::min(qt1(b, a), qt2(b, a)) - alpha_now * logp[a]);
            }
            const double bootstrap = batch[b].terminal ? 0.0 : config_.gamma * v;
            targets[b] = batch[b].reward + bootstrap;
        }
    } else {
        std::normal_distribution<double> normal(0.0, 1.0);
        Matrix next_inputs(n, state_dim_ + action_size_);
        std::vector<double> next_logp(n);
        for (std::size_t b = 0; b < n; ++b) {
            const auto g = gaussian_row(next_out.row(b));
            std::vector<double> u(action_size_);
            auto row = next_inputs.row(b);
            std::copy(batch[b].next_state.begin(), batch[b].next_state.end(), row.begin());
            for (std::size_t d = 0; d < action_size_; ++d) {
                u[d] = g.mean[d] + g.std[d] * normal(rng);
                row[state_dim_ + d] = std::tanh(u[d]);
            }
            next_logp[b] = head::squashed_log_prob(u, g, box_log_scale_);
        }
        ForwardTape t1, t2;
        const Matrix& qt1 = target1_.forward_batch(next_inputs, t1);
        const Matrix& qt2 = target2_.forward_batch(next_inputs, t2);
        for (std::size_t b = 0; b < n; ++b) {
            const double v = std::min(qt1(b, 0), qt2(b, 0)) - alpha_now * next_logp[b];
            const double bootstrap = batch[b].terminal ? 0.0 : config_.gamma * v;
            targets[b] = batch[b].reward + bootstrap;
        }
    }
    for (double y : targets) require_finite_scalar(y, "critic target");
    return targets;
}

LossAndGrad SacAgent::critic_loss(int which, const std::vector<buffers::Transition>& batch,
                                  const std::vector<double>& targets) const {
    if (batch.empty() || targets.size() != batch.size()) throw DimensionError("critic_loss: batch and targets differ");
    const std::size_t n = batch.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    Matrix inputs(n, discrete_ ? state_dim_ : state_dim_ + action_size_);
    for (std::size_t b = 0; b < n; ++b) {
        auto row = inputs.row(b);
        std::copy(batch[b].state.begin(), batch[b].state.end(), row.begin());
        if (!discrete_) {
            const auto unit = unit_action(batch[b].action);
            std::copy(unit.begin(), unit.end(), row.begin() + static_cast<std::ptrdiff_t>(state_dim_));
        }
    }

    const DenseNet& net = critic(which);
    ForwardTape tape;
    const Matrix& q = net.forward_batch(inputs, tape);
    Matrix upstream(n, net.output_size());
    double loss = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
        const std::size_t col = discrete_ ? std::get<std::size_t>(batch[b].action) : 0;
        const double err = q(b, col) - targets[b];
        loss += 0.5 * err * err;
        upstream(b, col) = err * inv_n;
    }
    LossAndGrad out;
    out.grad.assign(net.parameters().size(), 0.0);
    net.backward_batch(tape, upstream, out.grad);
    out.loss = loss * inv_n;
    return out;
}

CriticReport SacAgent::critic_update(const std::vector<buffers::Transition>& batch, std::mt19937_64& rng) {
    if (batch.empty()) throw Error("critic_update: empty batch");
    const auto targets = critic_targets(batch, rng);
    CriticReport report;
    double target_sum = 0.0;
    for (double y : targets) target_sum += y;
    report.mean_target = target_sum / static_cast<double>(batch.size());
    // Both losses are taken before either critic moves.
    const auto g1 = critic_loss(0, batch, targets);
    const auto g2 = critic_loss(1, batch, targets);
    numerics::apply_update(critic1_, critic1_opt_, g1.grad);
    numerics::apply_update(critic2_, critic2_opt_, g2.grad);
    report.loss1 = g1.loss;
    report.loss2 = g2.loss;
    return report;
}

void SacAgent::update_targets() {
    numerics::polyak_update(target1_, critic1_, config_.tau);
    numerics::polyak_update(target2_, critic2_, config_.tau);
}

// --- actor -------------------------------------------------------------------

PolicyDistribution SacAgent::policy(std::span<const double> state) const {
    const auto out = actor_.forward(state);
    PolicyDistribution dist;
    dist.discrete = discrete_;
    if (discrete_) {
        dist.probabilities = head::softmax(out);
    } else {
        dist.gaussian = gaussian_row(out);
    }
    return dist;
}

envs::Action SacAgent::act(std::span<const double> state, ActMode mode, std::mt19937_64& rng) const {
    const PolicyDistribution dist = policy(state);
    if (discrete_) {
        if (mode == ActMode::Deterministic) return head::argmax(dist.probabilities);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const double draw = uniform(rng);
        double cumulative = 0.0;
        for (std::size_t a = 0; a < dist.probabilities.size(); ++a) {
            cumulative += dist.probabilities[a];
            if (draw < cumulative) return a;
        }
        return dist.probabilities.size() - 1;
    }
    std::vector<double> unit(action_size_);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t d = 0; d < action_size_; ++d) {
        const double u = mode == ActMode::Deterministic ? dist.gaussian.mean[d]
                                                        : dist.gaussian.mean[d] + dist.gaussian.std[d] * normal(rng);
        unit[d] = std::tanh(u);
    }
    auto box_action = to_box(unit);
    // Guard against the affine map rounding a hair outside the bounds.
    const auto& box = std::get<envs::BoxSpace>(space_);
    for (std::size_t d = 0; d < action_size_; ++d) box_action[d] = std::clamp(box_action[d], box.low[d], box.high[d]);
    return box_action;
}

double SacAgent::log_prob(std::span<const double> state, const envs::Action& action) const {
    envs::require_contains(space_, action);
    const auto out = actor_.forward(state);
    if (discrete_) return head::log_softmax(out)[std::get<std::size_t>(action)];
    const auto g = gaussian_row(out);
    auto unit = unit_action(action);
    std::vector<double> u(unit.size());
    for (std::size_t d = 0; d < unit.size(); ++d) {
        u[d] = std::atanh(std::clamp(unit[d], -buffers::kSquashClamp, buffers::kSquashClamp));
    }
    return head::squashed_log_prob(u, g, box_log_scale_);
}

Matrix SacAgent::sample_noise(std::size_t rows, std::mt19937_64& rng) const {
    Matrix noise(rows, discrete_ ? 0 : action_size_);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : noise.values()) v = normal(rng);
    return noise;
}

const Matrix& SacAgent::actor_forward(const Matrix& states, ForwardTape& tape) const {
    return actor_.forward_batch(states, tape);
}

std::vector<double> SacAgent::actor_backward(const ForwardTape& tape, const Matrix& d_out) const {
    std::vector<double> grad(actor_.parameters().size(), 0.0);
    actor_.backward_batch(tape, d_out, grad);
    return grad;
}

LossAndGrad SacAgent::baseline_policy_loss(const Matrix& states, const Matrix* noise) const {
    const std::size_t n = states.rows();
    if (n == 0) throw Error("baseline_policy_loss: empty batch");
    const double inv_n = 1.0 / static_cast<double>(n);
    const double alpha_now = alpha();

    ForwardTape actor_tape;
    const Matrix& out = actor_.forward_batch(states, actor_tape);
    Matrix d_out(n, out.cols());
    LossAndGrad result;

    if (discrete_) {
        ForwardTape t1, t2;
        const Matrix& q1 = critic1_.forward_batch(states, t1);
        const Matrix& q2 = critic2_.forward_batch(states, t2);
        std::vector<double> f(action_size_);
        for (std::size_t b = 0; b < n; ++b) {
            const auto logp = head::log_softmax(out.row(b));
            double expected = 0.0;
            std::vector<double> p(action_size_);
            for (std::size_t a = 0; a < action_size_; ++a) {
                p[a] = std::exp(logp[a]);
                f[a] = alpha_now * logp[a] - std::min(q1(b, a), q2(b, a));
                expected += p[a] * f[a];
            }
            result.loss += expected;
            // d/dz_j sum_a p_a f_a = p_j (f_j - sum_a p_a f_a)
            for (std::size_t a = 0; a < action_size_; ++a) d_out(b, a) = p[a] * (f[a] - expected) * inv_n;
        }
    } else {
        if (noise == nullptr || noise->rows() != n || noise->cols() != action_size_) {
            throw DimensionError("baseline_policy_loss: box policies need one noise row per state");
        }
        const std::size_t dim = action_size_;
        Matrix inputs(n, state_dim_ + dim);
        std::vector<head::GaussianParams> params(n);
        Matrix pre(n, dim);
        for (std::size_t b = 0; b < n; ++b) {
            params[b] = gaussian_row(out.row(b));
            auto row = inputs.row(b);
            std::copy(states.row(b).begin(), states.row(b).end(), row.begin());
            for (std::size_t d = 0; d < dim; ++d) {
                pre(b, d) = params[b].mean[d] + params[b].std[d] * (*noise)(b, d);
                row[state_dim_ + d] = std::tanh(pre(b, d));
            }
        }
        ForwardTape t1, t2;
        const Matrix& q1 = critic1_.forward_batch(inputs, t1);
        const Matrix& q2 = critic2_.forward_batch(inputs, t2);
        // Route dQ/da through whichever critic attains the minimum per row.
        Matrix up1(n, 1), up2(n, 1);
        for (std::size_t b = 0; b < n; ++b) {
            if (q1(b, 0) <= q2(b, 0)) {
                up1(b, 0) = 1.0;
            } else {
                up2(b, 0) = 1.0;
            }
        }
        std::vector<double> scratch1(critic1_.parameters().size(), 0.0);
        std::vector<double> scratch2(critic2_.parameters().size(), 0.0);
        const Matrix dq1 = critic1_.backward_batch(t1, up1, scratch1, true);
        const Matrix dq2 = critic2_.backward_batch(t2, up2, scratch2, true);
        for (std::size_t b = 0; b < n; ++b) {
            const auto& g = params[b];
            const auto u = pre.row(b);
            const double logp = head::squashed_log_prob(u, g, box_log_scale_);
            const double qmin = std::min(q1(b, 0), q2(b, 0));
            result.loss += alpha_now * logp - qmin;
            for (std::size_t d = 0; d < dim; ++d) {
                const double y = std::tanh(u[d]);
                const double dq_dy = dq1(b, state_dim_ + d) + dq2(b, state_dim_ + d);
                const double dl_du = (alpha_now * 2.0 * y - dq_dy * (1.0 - y * y)) * inv_n;
                d_out(b, d) = dl_du;
                d_out(b, dim + d) =
                    g.log_std_free[d] ? (-alpha_now * inv_n + dl_du * g.std[d] * (*noise)(b, d)) : 0.0;
            }
        }
    }
    result.loss *= inv_n;
    require_finite_scalar(result.loss, "policy loss");
    result.grad = actor_backward(actor_tape, d_out);
    return result;
}

void SacAgent::apply_actor_gradient(std::span<const double> grad) { numerics::apply_update(actor_, actor_opt_, grad); }

double SacAgent::update_alpha(const Matrix& states, const Matrix* noise) {
    const std::size_t n = states.rows();
    if (n == 0) return 0.0;
    ForwardTape tape;
    const Matrix& out = actor_.forward_batch(states, tape);
    double entropy_sum = 0.0;
    double neg_logp_sum = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
        if (discrete_) {
            const double h = head::categorical_entropy(head::softmax(out.row(b)));
            entropy_sum += h;
            neg_logp_sum += h;
        } else {
            const auto g = gaussian_row(out.row(b));
            entropy_sum += head::gaussian_entropy(g);
            if (noise != nullptr) {
                std::vector<double> u(action_size_);
                for (std::size_t d = 0; d < action_size_; ++d) u[d] = g.mean[d] + g.std[d] * (*noise)(b, d);
                neg_logp_sum -= head::squashed_log_prob(u, g, box_log_scale_);
            }
        }
    }
    const double mean_entropy = entropy_sum / static_cast<double>(n);
    if (config_.auto_alpha) {
        if (!discrete_ && noise == nullptr) throw DimensionError("update_alpha: box policies need noise");
        // loss = log_alpha * (H - H_target), H estimated by -log pi for boxes.
        const double grad = neg_logp_sum / static_cast<double>(n) - target_entropy();
        std::vector<double> g{grad};
        alpha_opt_.apply(std::span<double>(&log_alpha_, 1), g);
    }
    return mean_entropy;
}

// --- persistence -------------------------------------------------------------

numerics::TensorMap SacAgent::export_tensors() const {
    numerics::TensorMap map;
    numerics::export_net(actor_, "actor", map);
    numerics::export_net(critic1_, "critic1", map);
    numerics::export_net(critic2_, "critic2", map);
    numerics::export_net(target1_, "target1", map);
    numerics::export_net(target2_, "target2", map);
    map["log_alpha"] = numerics::Tensor{{1}, {log_alpha_}};
    return map;
}

void SacAgent::import_tensors(const numerics::TensorMap& tensors) {
    numerics::import_net(actor_, "actor", tensors);
    numerics::import_net(critic1_, "critic1", tensors);
    numerics::import_net(critic2_, "critic2", tensors);
    numerics::import_net(target1_, "target1", tensors);
    numerics::import_net(target2_, "target2", tensors);
    const auto it = tensors.find("log_alpha");
    if (it == tensors.end() || it->second.values.size() != 1) throw Error("checkpoint: missing log_alpha");
    log_alpha_ = it->second.values[0];
}

}  // namespace varl::sac
