#include "varl/numerics/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define VARL_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#else
#define VARL_HAVE_AVX2_KERNELS 0
#endif

namespace varl::numerics::kernels {

#if VARL_HAVE_AVX2_KERNELS
namespace {

// Only this translation unit carries AVX2 code, and only inside functions
// tagged with the target attribute, so nothing here leaks into the baseline
// build through inlined templates.
#define VARL_AVX2 __attribute__((target("avx2,fma")))

VARL_AVX2 double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    const __m128d swapped = _mm_unpackhi_pd(pair, pair);
    return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

VARL_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

VARL_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

VARL_AVX2 void lerp_avx2(double* target, const double* source, double tau, std::size_t n) {
    const double keep = 1.0 - tau;
    const __m256d vkeep = _mm256_set1_pd(keep);
    const __m256d vtau = _mm256_set1_pd(tau);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_mul_pd(vkeep, _mm256_loadu_pd(target + i));
        const __m256d s = _mm256_mul_pd(vtau, _mm256_loadu_pd(source + i));
        _mm256_storeu_pd(target + i, _mm256_add_pd(t, s));
    }
    for (; i < n; ++i) target[i] = keep * target[i] + tau * source[i];
}

VARL_AVX2 void adam_avx2(double* param, double* m, double* v, const double* grad, std::size_t n,
                         const AdamStep& s) {
    const __m256d b1 = _mm256_set1_pd(s.beta1);
    const __m256d b2 = _mm256_set1_pd(s.beta2);
    const __m256d c1 = _mm256_set1_pd(1.0 - s.beta1);
    const __m256d c2 = _mm256_set1_pd(1.0 - s.beta2);
    const __m256d bc1 = _mm256_set1_pd(s.bias_correction1);
    const __m256d bc2 = _mm256_set1_pd(s.bias_correction2);
    const __m256d lr = _mm256_set1_pd(s.learning_rate);
    const __m256d eps = _mm256_set1_pd(s.epsilon);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d g = _mm256_loadu_pd(grad + i);
        const __m256d vm = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                                         _mm256_mul_pd(c1, g));
        const __m256d vv = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                         _mm256_mul_pd(c2, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(m + i, vm);
        _mm256_storeu_pd(v + i, vv);
        const __m256d m_hat = _mm256_div_pd(vm, bc1);
        const __m256d v_hat = _mm256_div_pd(vv, bc2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps);
        const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, m_hat), denom);
        _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), step));
    }
    const double one_minus_b1 = 1.0 - s.beta1;
    const double one_minus_b2 = 1.0 - s.beta2;
    for (; i < n; ++i) {
        const double g = grad[i];
        m[i] = s.beta1 * m[i] + one_minus_b1 * g;
        v[i] = s.beta2 * v[i] + one_minus_b2 * (g * g);
        const double m_hat = m[i] / s.bias_correction1;
        const double v_hat = v[i] / s.bias_correction2;
        param[i] -= s.learning_rate * m_hat / (__builtin_sqrt(v_hat) + s.epsilon);
    }
}

#undef VARL_AVX2

}  // namespace

const KernelTable* avx2_table() {
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    static const KernelTable table{"avx2", dot_avx2, axpy_avx2, lerp_avx2, adam_avx2};
    return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace varl::numerics::kernels
