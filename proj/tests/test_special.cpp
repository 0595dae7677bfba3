#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "zeta_chaos/quadrature.hpp"
#include "zeta_chaos/special.hpp"

using namespace zeta_chaos;

namespace {

// Independent quadrature oracles for the special functions.
double j0_oracle(double z) {
    return integrate([&](double t) { return std::cos(z * std::sin(t)); }, 0.0,
                     std::numbers::pi, 1e-13) /
           std::numbers::pi;
}

double i0_oracle(double z) {
    return integrate([&](double t) { return std::exp(z * std::cos(t)); }, 0.0,
                     2.0 * std::numbers::pi, 1e-13) /
           (2.0 * std::numbers::pi);
}

double si_oracle(double x) {
    return integrate([](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }, 0.0, x,
                     1e-13);
}

} // namespace

TEST_CASE("quadrature reproduces closed forms") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) == Catch::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
          Catch::Approx(2.0).epsilon(1e-12));
    // endpoint singularity: int_0^1 x^{-1/2} = 2
    CHECK(integrate_tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-11) ==
          Catch::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("J0 against quadrature oracle and frozen values") {
    CHECK(bessel_j0(1.0) == Catch::Approx(0.7651976865579666).margin(1e-13));
    for (double z : {0.0, 0.3, 1.0, 4.0, 7.5, 12.0, 15.9, 16.1, 25.0, 80.0, 400.0})
        CHECK(bessel_j0(z) == Catch::Approx(j0_oracle(z)).margin(1e-12));
    CHECK(bessel_j0(-3.0) == bessel_j0(3.0));
}

TEST_CASE("I0 against quadrature oracle and frozen values") {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    CHECK(bessel_i0(inv_sqrt2) == Catch::Approx(1.1289609294541276).margin(1e-13));
    CHECK(bessel_i0(std::sqrt(2.0)) == Catch::Approx(1.5660829297563505).margin(1e-13));
    for (double z : {0.0, 0.01, 0.5, 2.0, 8.0, 15.9, 16.1, 30.0})
        CHECK(bessel_i0(z) == Catch::Approx(i0_oracle(z)).epsilon(1e-12));
}

TEST_CASE("log I0 matches log of the oracle on both branches") {
    for (double z : {1e-6, 1e-3, 0.009, 0.011, 0.5, 2.0, 17.0})
        CHECK(log_bessel_i0(z) == Catch::Approx(std::log(i0_oracle(z))).margin(1e-13));
    CHECK(log_bessel_i0(0.70710678118654752440) ==
          Catch::Approx(0.12129767823933005).margin(1e-13));
}

TEST_CASE("Si and Ci against oracles") {
    CHECK(si(std::numbers::pi) == Catch::Approx(1.8519370519824662).margin(1e-12));
    for (double x : {0.1, 1.0, 4.0, 7.9, 8.1, 20.0, 300.0})
        CHECK(si(x) == Catch::Approx(si_oracle(x)).margin(1e-11));
    CHECK(si(-2.0) == -si(2.0));
    // frozen mpmath values
    CHECK(ci(1.0) == Catch::Approx(0.3374039229009681).margin(1e-13));
    CHECK(ci(10.0) == Catch::Approx(-0.04545643300445537).margin(1e-13));
    CHECK(ci(100.0) == Catch::Approx(2.0 * si(100.0) / 100.0 - 0.0).margin(1.0));  // sanity
    CHECK_THROWS_AS(ci(0.0), std::domain_error);
    // Ci via the definition gamma + log x + int_0^x (cos t - 1)/t dt
    for (double x : {0.5, 3.0, 8.5, 40.0}) {
        const double oracle =
            0.5772156649015329 + std::log(x) +
            integrate([](double t) { return t == 0 ? 0.0 : (std::cos(t) - 1.0) / t; }, 0.0,
                      x, 1e-13);
        CHECK(ci(x) == Catch::Approx(oracle).margin(1e-11));
    }
}

TEST_CASE("c_hat values and positivity") {
    CHECK(c_hat(0.0) == 2.0);  // int_{-1}^{1} log(1/|x|) dx
    CHECK(c_hat(1e-9) == Catch::Approx(2.0).margin(1e-12));
    // large-k decay pi/k + O(k^-2), constant measured
    CHECK(std::abs(c_hat(100.0) - std::numbers::pi / 100.0) < 2.0 / (100.0 * 100.0));
    for (int i = 0; i <= 400; ++i) {
        const double k = std::pow(10.0, -2.0 + 6.0 * i / 400.0);  // log-spaced to 1e4
        CHECK(c_hat(k) >= 0.0);
    }
    CHECK_THROWS_AS(c_hat(-1.0), std::domain_error);
}
