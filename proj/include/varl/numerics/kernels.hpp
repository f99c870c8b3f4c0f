#pragma once

// Inner-loop arithmetic used by the dense networks and optimizers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is picked once at startup from CPUID; setting
// VARL_KERNELS=scalar in the environment forces the reference path. The two
// tables agree to rounding (see the kernel tests), but are not
// bitwise identical, so a single process always sticks to one table.

#include <cstddef>
#include <span>
#include <string_view>

namespace varl::numerics::kernels {

struct AdamStep {
    double learning_rate;
    double beta1;
    double beta2;
    double epsilon;
    double bias_correction1;  // 1 - beta1^t
    double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
    std::string_view name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // target = (1 - tau) * target + tau * source
    void (*lerp)(double* target, const double* source, double tau, std::size_t n);
    void (*adam)(double* param, double* m, double* v, const double* grad, std::size_t n,
                 const AdamStep& step);
};

const KernelTable& scalar_table();

/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

const KernelTable& active();

/// Forces a table by name ("scalar" or "avx2"). Returns false if unavailable.
/// Not meant to be called while other threads are running kernels.
bool select(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace varl::numerics::kernels
