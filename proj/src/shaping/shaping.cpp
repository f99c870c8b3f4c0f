#include "varl/shaping/shaping.hpp"

#include <algorithm>
#include <cmath>

#include "varl/errors.hpp"

namespace varl::shaping {

using numerics::ForwardTape;
using numerics::Matrix;

void ShapingConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("shaping.lambda must be a finite value >= 0");
    if (cutoff < 1) throw ConfigError("shaping.cutoff must be at least 1");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("shaping.kappa must be positive");
    if (guidance_batch == 0) throw ConfigError("shaping.guidance_batch must be positive");
}

namespace {

bool is_maximiser(std::span<const double> q, std::size_t a) {
    const double peak = *std::max_element(q.begin(), q.end());
    return q[a] >= peak;
}

std::vector<double> presquash(const sac::SacAgent& agent, std::span<const double> advice) {
    const auto& box = std::get<envs::BoxSpace>(agent.action_space());
    auto u = envs::to_unit(box, advice);
    for (double& v : u) v = std::atanh(std::clamp(v, -buffers::kSquashClamp, buffers::kSquashClamp));
    return u;
}

double mahalanobis(std::span<const double> u, const sac::head::GaussianParams& g) {
    double d2 = 0.0;
    for (std::size_t d = 0; d < u.size(); ++d) {
        const double z = (u[d] - g.mean[d]) / g.std[d];
        d2 += z * z;
    }
    return d2;
}

GateResult discrete_gate_from_q(std::span<const double> q, std::size_t advice) {
    GateResult r;
    r.greedy_action = sac::head::argmax(q);
    r.active = !is_maximiser(q, advice);
    return r;
}

GateResult box_gate_from_row(const sac::SacAgent& agent, std::span<const double> actor_row,
                             std::span<const double> u, double kappa) {
    GateResult r;
    r.distance = mahalanobis(u, agent.gaussian_row(actor_row));
    r.active = r.distance > kappa * kappa;
    return r;
}

Matrix stack_states(const sac::SacAgent& agent, const std::vector<buffers::GuidancePair>& pairs) {
    Matrix states(pairs.size(), agent.state_dim());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].state.size() != agent.state_dim()) throw DimensionError("guidance state has the wrong size");
        std::copy(pairs[i].state.begin(), pairs[i].state.end(), states.row(i).begin());
    }
    return states;
}

/// sum_i weight_i * (-log pi(a_i | s_i)) / n and its actor gradient.
sac::LossAndGrad weighted_nll(const sac::SacAgent& agent, const std::vector<buffers::GuidancePair>& pairs,
                              const std::vector<double>& weights) {
    const std::size_t n = pairs.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    const Matrix states = stack_states(agent, pairs);
    ForwardTape tape;
    const Matrix& out = agent.actor_forward(states, tape);
    Matrix d_out(n, out.cols());
    sac::LossAndGrad result;
    const std::size_t dim = agent.action_size();
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights[i] * inv_n;
        if (w == 0.0) continue;
        if (agent.discrete()) {
            const std::size_t a = std::get<std::size_t>(pairs[i].action);
            const auto logp = sac::head::log_softmax(out.row(i));
            result.loss += w * -logp[a];
            for (std::size_t j = 0; j < dim; ++j) d_out(i, j) = w * (std::exp(logp[j]) - (j == a ? 1.0 : 0.0));
        } else {
            const auto g = agent.gaussian_row(out.row(i));
            const auto& u = pairs[i].presquash;
            result.loss += w * -sac::head::squashed_log_prob(u, g, agent.box_log_scale());
            for (std::size_t d = 0; d < dim; ++d) {
                const double z = (u[d] - g.mean[d]) / g.std[d];
                d_out(i, d) = w * (-z / g.std[d]);
                d_out(i, dim + d) = g.log_std_free[d] ? w * (1.0 - z * z) : 0.0;
            }
        }
    }
    result.grad = agent.actor_backward(tape, d_out);
    if (!std::isfinite(result.loss)) throw NumericError("non-finite behaviour-cloning loss");
    return result;
}

}  // namespace

GateResult gate_discrete(const sac::SacAgent& agent, std::span<const double> state, std::size_t advice) {
    if (!agent.discrete()) throw Error("gate_discrete requires a discrete agent");
    envs::require_contains(agent.action_space(), envs::Action{advice});
    return discrete_gate_from_q(agent.min_q_all(state), advice);
}

GateResult gate_continuous(const sac::SacAgent& agent, std::span<const double> state,
                           std::span<const double> advice, double kappa) {
    if (agent.discrete()) throw Error("gate_continuous requires a box agent");
    envs::require_contains(agent.action_space(), envs::Action{std::vector<double>(advice.begin(), advice.end())});
    const auto row = agent.actor().forward(state);
    return box_gate_from_row(agent, row, presquash(agent, advice), kappa);
}

GateResult gate(const sac::SacAgent& agent, const buffers::GuidancePair& pair, double kappa) {
    if (agent.discrete()) return gate_discrete(agent, pair.state, std::get<std::size_t>(pair.action));
    const auto row = agent.actor().forward(pair.state);
    return box_gate_from_row(agent, row, pair.presquash, kappa);
}

std::vector<GateResult> gate_batch(const sac::SacAgent& agent, const std::vector<buffers::GuidancePair>& pairs,
                                   double kappa) {
    std::vector<GateResult> out;
    if (pairs.empty()) return out;
    out.reserve(pairs.size());
    const Matrix states = stack_states(agent, pairs);
    if (agent.discrete()) {
        ForwardTape t1, t2;
        const Matrix& q1 = agent.critic(0).forward_batch(states, t1);
        const Matrix& q2 = agent.critic(1).forward_batch(states, t2);
        std::vector<double> q(agent.action_size());
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            for (std::size_t a = 0; a < q.size(); ++a) q[a] = std::min(q1(i, a), q2(i, a));
            out.push_back(discrete_gate_from_q(q, std::get<std::size_t>(pairs[i].action)));
        }
    } else {
        ForwardTape tape;
        const Matrix& rows = agent.actor_forward(states, tape);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            out.push_back(box_gate_from_row(agent, rows.row(i), pairs[i].presquash, kappa));
        }
    }
    return out;
}

double negative_log_prob(const sac::SacAgent& agent, const buffers::GuidancePair& pair) {
    const auto row = agent.actor().forward(pair.state);
    if (agent.discrete()) return -sac::head::log_softmax(row)[std::get<std::size_t>(pair.action)];
    return -sac::head::squashed_log_prob(pair.presquash, agent.gaussian_row(row), agent.box_log_scale());
}

sac::LossAndGrad bc_loss(const sac::SacAgent& agent, const std::vector<buffers::GuidancePair>& pairs) {
    if (pairs.empty()) throw Error("bc_loss: empty batch");
    return weighted_nll(agent, pairs, std::vector<double>(pairs.size(), 1.0));
}

ShapingResult shaping_loss(const sac::SacAgent& agent, const ShapingConfig& config,
                           const std::vector<buffers::GuidancePair>& pairs) {
    ShapingResult result;
    result.batch = pairs.size();
    result.term.grad.assign(agent.actor().parameters().size(), 0.0);
    if (pairs.empty()) return result;
    const auto gates = gate_batch(agent, pairs, config.kappa);
    std::vector<double> weights(pairs.size(), 0.0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (gates[i].active) {
            ++result.active;
            weights[i] = config.lambda;
        }
    }
    if (result.active == 0 || config.lambda == 0.0) return result;
    result.term = weighted_nll(agent, pairs, weights);
    return result;
}

ActorLoss actor_loss(const sac::SacAgent& agent, const ShapingConfig& config, std::uint64_t step,
                     const numerics::Matrix& states, const numerics::Matrix* noise,
                     const std::vector<buffers::GuidancePair>& pairs) {
    if (step < 1) throw Error("actor_loss: steps are counted from 1");
    ActorLoss out;
    out.total = agent.baseline_policy_loss(states, noise);
    out.baseline_loss = out.total.loss;
    if (step > config.cutoff || pairs.empty()) return out;
    out.shaping = shaping_loss(agent, config, pairs);
    out.shaping_applied = true;
    out.total.loss += out.shaping.term.loss;
    for (std::size_t i = 0; i < out.total.grad.size(); ++i) out.total.grad[i] += out.shaping.term.grad[i];
    return out;
}

}  // namespace varl::shaping
