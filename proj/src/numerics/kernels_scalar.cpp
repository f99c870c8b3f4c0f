#include "varl/numerics/kernels.hpp"

#include <cmath>

namespace varl::numerics::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void lerp_scalar(double* target, const double* source, double tau, std::size_t n) {
    const double keep = 1.0 - tau;
    for (std::size_t i = 0; i < n; ++i) target[i] = keep * target[i] + tau * source[i];
}

void adam_scalar(double* param, double* m, double* v, const double* grad, std::size_t n,
                 const AdamStep& s) {
    const double one_minus_b1 = 1.0 - s.beta1;
    const double one_minus_b2 = 1.0 - s.beta2;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        m[i] = s.beta1 * m[i] + one_minus_b1 * g;
        v[i] = s.beta2 * v[i] + one_minus_b2 * (g * g);
        const double m_hat = m[i] / s.bias_correction1;
        const double v_hat = v[i] / s.bias_correction2;
        param[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.epsilon);
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar", dot_scalar, axpy_scalar, lerp_scalar, adam_scalar};
    return table;
}

}  // namespace varl::numerics::kernels
