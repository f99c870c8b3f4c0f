#include "varl/sac/policy_head.hpp"

#include <algorithm>

namespace varl::sac::head {

std::vector<double> log_softmax(std::span<const double> logits) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double z : logits) total += std::exp(z - peak);
    const double log_norm = peak + std::log(total);
    std::vector<double> out(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_norm;
    return out;
}

std::vector<double> softmax(std::span<const double> logits) {
    auto out = log_softmax(logits);
    for (double& v : out) v = std::exp(v);
    return out;
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

GaussianParams split_gaussian(std::span<const double> row, std::size_t dim, double log_std_min, double log_std_max) {
    GaussianParams g;
    g.mean.assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(dim));
    g.log_std.resize(dim);
    g.std.resize(dim);
    g.log_std_free.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const double raw = row[dim + d];
        g.log_std_free[d] = raw > log_std_min && raw < log_std_max;
        g.log_std[d] = std::clamp(raw, log_std_min, log_std_max);
        g.std[d] = std::exp(g.log_std[d]);
    }
    return g;
}

double box_log_scale(std::span<const double> low, std::span<const double> high) {
    double s = 0.0;
    for (std::size_t d = 0; d < low.size(); ++d) s += std::log(0.5 * (high[d] - low[d]));
    return s;
}

double squashed_log_prob(std::span<const double> u, const GaussianParams& g, double log_scale) {
    double lp = -log_scale;
    for (std::size_t d = 0; d < u.size(); ++d) {
        const double z = (u[d] - g.mean[d]) / g.std[d];
        lp += -0.5 * z * z - g.log_std[d] - kHalfLog2Pi - log_one_minus_tanh_sq(u[d]);
    }
    return lp;
}

double categorical_entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double gaussian_entropy(const GaussianParams& g) {
    double h = 0.0;
    for (double ls : g.log_std) h += ls + kHalfLog2Pi + 0.5;
    return h;
}

}  // namespace varl::sac::head
