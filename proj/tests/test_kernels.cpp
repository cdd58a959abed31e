#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "dyslex/kernels.hpp"
#include "dyslex/rng.hpp"

using namespace dyslex;

namespace {

std::vector<double> random_vec(rng::Stream& rs, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rs.uniform(-3.0, 3.0);
    return v;
}

// straight-line reference sums, no unrolling, no pairwise tricks
double ref_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("kernel results match a straight-line reference") {
    rng::Stream rs(11);
    // lengths straddling the 4-lane vector width, including remainder tails
    for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3}, std::size_t{4},
                          std::size_t{5}, std::size_t{7}, std::size_t{8}, std::size_t{63},
                          std::size_t{64}, std::size_t{65}, std::size_t{257}}) {
        const auto a = random_vec(rs, n);
        const auto b = random_vec(rs, n);
        double sum = 0.0, sumsq = 0.0, sqd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += a[i];
            sumsq += a[i] * a[i];
            const double d = a[i] - b[i];
            sqd += d * d;
        }
        const double tol = 1e-12 * static_cast<double>(n);
        CHECK(kernels::dot(a.data(), b.data(), n) == doctest::Approx(ref_dot(a, b)).epsilon(tol));
        CHECK(kernels::sum(a.data(), n) == doctest::Approx(sum).epsilon(tol));
        CHECK(kernels::sumsq(a.data(), n) == doctest::Approx(sumsq).epsilon(tol));
        CHECK(kernels::squared_distance(a.data(), b.data(), n) == doctest::Approx(sqd).epsilon(tol));

        auto y = b;
        kernels::axpy(0.75, a.data(), y.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(b[i] + 0.75 * a[i]));
    }
}

TEST_CASE("scalar and avx2 backends agree") {
    if (!kernels::avx2_available()) {
        MESSAGE("avx2 not available on this machine; backend equivalence skipped");
        return;
    }
    rng::Stream rs(12);
    for (std::size_t n : {std::size_t{1}, std::size_t{6}, std::size_t{32}, std::size_t{201}}) {
        const auto a = random_vec(rs, n);
        const auto b = random_vec(rs, n);

        kernels::force_backend(kernels::Backend::scalar);
        const double dot_s = kernels::dot(a.data(), b.data(), n);
        const double sum_s = kernels::sum(a.data(), n);
        const double sumsq_s = kernels::sumsq(a.data(), n);
        const double sqd_s = kernels::squared_distance(a.data(), b.data(), n);
        auto ys = b;
        kernels::axpy(-1.25, a.data(), ys.data(), n);

        kernels::force_backend(kernels::Backend::avx2);
        CHECK(kernels::dot(a.data(), b.data(), n) == doctest::Approx(dot_s).epsilon(1e-13));
        CHECK(kernels::sum(a.data(), n) == doctest::Approx(sum_s).epsilon(1e-13));
        CHECK(kernels::sumsq(a.data(), n) == doctest::Approx(sumsq_s).epsilon(1e-13));
        CHECK(kernels::squared_distance(a.data(), b.data(), n) == doctest::Approx(sqd_s).epsilon(1e-13));
        auto yv = b;
        kernels::axpy(-1.25, a.data(), yv.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(yv[i] == doctest::Approx(ys[i]).epsilon(1e-13));

        kernels::force_backend(kernels::Backend::scalar);
    }
    // leave the dispatcher on the widest backend for the rest of the run
    kernels::force_backend(kernels::Backend::avx2);
}

TEST_CASE("backend dispatcher reports a usable backend") {
    const auto b = kernels::active_backend();
    CHECK((b == kernels::Backend::scalar || b == kernels::Backend::avx2));
    CHECK(!kernels::backend_name().empty());
    if (b == kernels::Backend::avx2) CHECK(kernels::avx2_available());
}

TEST_CASE("seeded streams are deterministic") {
    rng::Stream a(99), b(99), c(100);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const double va = a.uniform01(), vb = b.uniform01(), vc = c.uniform01();
        all_equal = all_equal && va == vb;
        any_diff = any_diff || va != vc;
        CHECK(va > 0.0);
        CHECK(va <= 1.0);
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("derive_seed separates substreams by path") {
    const auto s0 = rng::derive_seed(7, {1, 0});
    const auto s1 = rng::derive_seed(7, {1, 1});
    const auto s2 = rng::derive_seed(7, {2, 0});
    const auto s0_again = rng::derive_seed(7, {1, 0});
    CHECK(s0 == s0_again);
    CHECK(s0 != s1);
    CHECK(s0 != s2);
    CHECK(s1 != s2);
    CHECK(rng::derive_seed(7, {}) != rng::derive_seed(8, {}));
}

TEST_CASE("below and shuffle stay in bounds and replay") {
    rng::Stream rs(5);
    for (int i = 0; i < 200; ++i) CHECK(rs.below(7) < 7);

    std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8};
    auto v2 = v1;
    rng::Stream s1(42), s2(42);
    s1.shuffle(v1);
    s2.shuffle(v2);
    CHECK(v1 == v2);
    std::sort(v1.begin(), v1.end());
    CHECK(v1 == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
}

TEST_CASE("normal draws have roughly standard moments") {
    rng::Stream rs(31);
    const int n = 20000;
    double m = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rs.normal();
        m += v;
        m2 += v * v;
    }
    m /= n;
    m2 /= n;
    CHECK(std::abs(m) < 0.05);
    CHECK(std::abs(m2 - 1.0) < 0.05);
}

}  // TEST_SUITE
