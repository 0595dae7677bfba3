#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "zeta_chaos/rng.hpp"
#include "zeta_chaos/special.hpp"
#include "zeta_chaos/stats.hpp"

using namespace zeta_chaos;

TEST_CASE("philox determinism and stream separation") {
    const auto a = philox4(123, 7, 99);
    const auto b = philox4(123, 7, 99);
    CHECK(a == b);
    CHECK(philox4(123, 7, 100) != a);
    CHECK(philox4(123, 8, 99) != a);
    CHECK(philox4(124, 7, 99) != a);
}

TEST_CASE("uniforms pass a KS test at 1%") {
    const std::size_t n = 100000;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = uniform01(2024, 5, i);
    const double d = ks_statistic(u, [](double x) { return x; });
    CHECK(d < ks_critical_1pct(n));
}

TEST_CASE("phases uniform on [0, 2 pi) at 1% KS") {
    const std::size_t n = 100000;
    std::vector<double> th(n);
    for (std::size_t i = 0; i < n; ++i) {
        th[i] = uniform_phase(99, 3, i);
        REQUIRE(th[i] >= 0.0);
        REQUIRE(th[i] < 2.0 * std::numbers::pi);
    }
    const double d =
        ks_statistic(th, [](double x) { return x / (2.0 * std::numbers::pi); });
    CHECK(d < ks_critical_1pct(n));
}

TEST_CASE("normal pairs: moments and KS") {
    const std::size_t n = 100000;
    std::vector<double> z1(n), z2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto z = normal_pair(7, 11, i);
        z1[i] = z[0];
        z2[i] = z[1];
    }
    const auto m1 = mean_se(z1), m2 = mean_se(z2);
    CHECK(std::abs(m1.mean) < 5 * m1.se);
    CHECK(std::abs(m2.mean) < 5 * m2.se);
    double v1 = 0, v2 = 0, cross = 0;
    for (std::size_t i = 0; i < n; ++i) {
        v1 += z1[i] * z1[i];
        v2 += z2[i] * z2[i];
        cross += z1[i] * z2[i];
    }
    v1 /= n;
    v2 /= n;
    cross /= n;
    CHECK(std::abs(v1 - 1.0) < 5 * std::sqrt(2.0 / n));
    CHECK(std::abs(v2 - 1.0) < 5 * std::sqrt(2.0 / n));
    CHECK(std::abs(cross) < 5 / std::sqrt((double)n));
    CHECK(ks_statistic(z1, [](double x) { return norm_cdf(x); }) < ks_critical_1pct(n));
}

TEST_CASE("cross-stream independence of cos theta") {
    const std::size_t n = 20000;
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i)
        sum += std::cos(uniform_phase(1, 100, i)) * std::cos(uniform_phase(1, 200, i));
    // E cos a cos b = 0 for independent streams; Var(cos a cos b) = 1/4
    CHECK(std::abs(sum / n) < 5 * 0.5 / std::sqrt((double)n));
}
