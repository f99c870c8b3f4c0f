#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "varl/numerics/kernels.hpp"

using namespace varl::numerics::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

// Lengths straddling the 4-wide vector width and the unrolled main loop.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 32, 33, 63, 64, 65, 130, 257};

}  // namespace

TEST_CASE("scalar dot matches a long-double reference") {
    std::mt19937_64 rng(1);
    for (std::size_t n : kLengths) {
        const auto a = random_vector(n, rng);
        const auto b = random_vector(n, rng);
        long double ref = 0.0L;
        for (std::size_t i = 0; i < n; ++i) ref += static_cast<long double>(a[i]) * b[i];
        CHECK(scalar_table().dot(a.data(), b.data(), n) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
    }
}

TEST_CASE("scalar kernels on hand-computed inputs") {
    const std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> y{10.0, 20.0, 30.0};
    scalar_table().axpy(0.5, x.data(), y.data(), 3);
    CHECK(y == std::vector<double>{10.5, 21.0, 31.5});

    std::vector<double> t{0.0, 4.0};
    const std::vector<double> s{8.0, 0.0};
    scalar_table().lerp(t.data(), s.data(), 0.25, 2);
    CHECK(t[0] == 2.0);
    CHECK(t[1] == 3.0);

    // First Adam step moves each parameter by lr * g / (|g| + eps').
    std::vector<double> p{1.0, 1.0};
    std::vector<double> m(2, 0.0), v(2, 0.0);
    const std::vector<double> g{0.5, -2.0};
    const AdamStep step{0.1, 0.9, 0.999, 1e-8, 1.0 - 0.9, 1.0 - 0.999};
    scalar_table().adam(p.data(), m.data(), v.data(), g.data(), 2, step);
    CHECK(p[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(1.0 + 0.1 * 2.0 / (2.0 + 1e-8)).epsilon(1e-12));
    CHECK(m[0] == doctest::Approx(0.05));
    CHECK(v[1] == doctest::Approx(0.004));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    const KernelTable* fast = avx2_table();
    if (fast == nullptr) {
        MESSAGE("AVX2 unavailable on this machine; equivalence not exercised");
        return;
    }
    const KernelTable& ref = scalar_table();
    std::mt19937_64 rng(7);
    for (std::size_t n : kLengths) {
        CAPTURE(n);
        const auto a = random_vector(n, rng);
        const auto b = random_vector(n, rng);
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
        CHECK(std::abs(fast->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-14 * (mag + 1.0));

        auto y1 = random_vector(n, rng);
        auto y2 = y1;
        fast->axpy(-0.37, a.data(), y1.data(), n);
        ref.axpy(-0.37, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

        auto t1 = random_vector(n, rng);
        auto t2 = t1;
        fast->lerp(t1.data(), b.data(), 0.005, n);
        ref.lerp(t2.data(), b.data(), 0.005, n);
        for (std::size_t i = 0; i < n; ++i) CHECK(t1[i] == doctest::Approx(t2[i]).epsilon(1e-15));

        auto p1 = random_vector(n, rng);
        auto p2 = p1;
        auto m1 = random_vector(n, rng, -0.1, 0.1);
        auto m2 = m1;
        auto v1 = random_vector(n, rng, 0.0, 0.1);
        auto v2 = v1;
        const AdamStep step{3e-4, 0.9, 0.999, 1e-8, 1.0 - std::pow(0.9, 5), 1.0 - std::pow(0.999, 5)};
        fast->adam(p1.data(), m1.data(), v1.data(), a.data(), n, step);
        ref.adam(p2.data(), m2.data(), v2.data(), a.data(), n, step);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(p1[i] == doctest::Approx(p2[i]).epsilon(1e-13));
            CHECK(m1[i] == doctest::Approx(m2[i]).epsilon(1e-13));
            CHECK(v1[i] == doctest::Approx(v2[i]).epsilon(1e-13));
        }
    }
}

TEST_CASE("table selection by name") {
    const auto& original = active();
    CHECK(select("scalar"));
    CHECK(active().name == "scalar");
    CHECK_FALSE(select("no-such-table"));
    if (avx2_table() != nullptr) {
        CHECK(select("avx2"));
        CHECK(active().name == "avx2");
    }
    CHECK(select(original.name));
}
