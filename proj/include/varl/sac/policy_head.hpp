#pragma once

// Distribution math shared by the SAC losses and the shaping terms.
//
// Discrete actors emit logits. Continuous actors emit [mean, raw log-std] per
// action dimension; the log-std is hard-clamped, a pre-squash sample
// u ~ N(mean, std^2) is squashed with tanh into [-1, 1] and mapped affinely
// onto the box. Densities over box actions include the tanh Jacobian and
// the affine scale.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace varl::sac::head {

inline constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

/// log(1 - tanh(u)^2), stable for large |u|.
inline double log_one_minus_tanh_sq(double u) { return 2.0 * (std::log(2.0) - u - softplus(-2.0 * u)); }

struct GaussianParams {
    std::vector<double> mean;
    std::vector<double> log_std;     // clamped
    std::vector<double> std;         // exp(log_std)
    std::vector<bool> log_std_free;  // false where the clamp is active (zero gradient)
};

/// Splits one actor output row [mean (d), raw log-std (d)].
GaussianParams split_gaussian(std::span<const double> row, std::size_t dim, double log_std_min, double log_std_max);

/// Sum over dimensions of log(half-width) of the box; the affine part of the
/// change of variables from [-1, 1]^d to the box.
double box_log_scale(std::span<const double> low, std::span<const double> high);

/// log density of the box action whose pre-squash value is `u`.
double squashed_log_prob(std::span<const double> u, const GaussianParams& g, double log_scale);

/// Entropy of a categorical distribution.
double categorical_entropy(std::span<const double> probs);

/// Differential entropy of the pre-squash diagonal Gaussian.
double gaussian_entropy(const GaussianParams& g);

}  // namespace varl::sac::head
