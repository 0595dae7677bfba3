#pragma once

// Special functions needed by the kernels: I0, J0, Si, Ci and the spectral
// weight c_hat.  Power series in long double below the switch point, Hankel
// asymptotics (I0, J0) or a Lentz continued fraction (Si, Ci) above it.
// Everything here is validated against quadrature oracles in the test suite.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace zeta_chaos {

// Modified Bessel function of the first kind, order zero.
inline double bessel_i0(double x) {
    const long double z = std::abs((long double)x);
    if (z <= 16.0L) {
        const long double q = 0.25L * z * z;
        long double term = 1.0L, sum = 1.0L;
        for (int k = 1; k < 120; ++k) {
            term *= q / ((long double)k * (long double)k);
            sum += term;
            if (term < sum * 1e-22L) break;
        }
        return (double)sum;
    }
    // I0(z) ~ e^z / sqrt(2 pi z) * sum_m ((2m-1)!!)^2 / (m! (8z)^m)
    long double term = 1.0L, sum = 1.0L;
    for (int m = 1; m < 40; ++m) {
        const long double f = (2.0L * m - 1.0L);
        term *= f * f / (8.0L * z * m);
        if (term < 1e-20L) break;
        sum += term;
    }
    return (double)(std::exp(z) / std::sqrt(2.0L * std::numbers::pi_v<long double> * z) * sum);
}

// log I0(x); the small-argument branch avoids the exp/log round trip that the
// prime-product normalizations would otherwise hit millions of times.
inline double log_bessel_i0(double x) {
    const double z = std::abs(x);
    if (z < 0.01) {
        const double q = 0.25 * z * z;
        return q * (1.0 - q * (0.25 - q / 9.0));
    }
    if (z <= 16.0) return std::log(bessel_i0(z));
    long double term = 1.0L, sum = 1.0L;
    const long double lz = z;
    for (int m = 1; m < 40; ++m) {
        const long double f = (2.0L * m - 1.0L);
        term *= f * f / (8.0L * lz * m);
        if (term < 1e-20L) break;
        sum += term;
    }
    return (double)(lz - 0.5L * std::log(2.0L * std::numbers::pi_v<long double> * lz) +
                    std::log(sum));
}

// Bessel function of the first kind, order zero.
inline double bessel_j0(double x) {
    const long double z = std::abs((long double)x);
    if (z <= 16.0L) {
        const long double q = -0.25L * z * z;
        long double term = 1.0L, sum = 1.0L;
        for (int k = 1; k < 80; ++k) {
            term *= q / ((long double)k * (long double)k);
            sum += term;
            if (std::abs(term) < 1e-22L) break;
        }
        return (double)sum;
    }
    // Hankel expansion: J0 = Re[ sqrt(2/(pi z)) e^{i(z - pi/4)} sum_m (-i/z)^m d_m ],
    // d_m = ((2m-1)!!)^2 / (m! 8^m), truncated at the smallest term.
    using C = std::complex<long double>;
    const C iz{0.0L, -1.0L / z};
    C pw{1.0L, 0.0L}, sum{1.0L, 0.0L};
    long double d = 1.0L, prev = 1.0L;
    for (int m = 1; m < 40; ++m) {
        const long double f = 2.0L * m - 1.0L;
        d *= f * f / (8.0L * m);
        const long double mag = d / std::pow((long double)z, (long double)m);
        if (mag > prev) break;
        prev = mag;
        pw *= iz;
        sum += pw * d;
        if (mag < 1e-20L) break;
    }
    const long double chi = z - 0.25L * std::numbers::pi_v<long double>;
    const C e{std::cos(chi), std::sin(chi)};
    const long double amp = std::sqrt(2.0L / (std::numbers::pi_v<long double> * z));
    return (double)(amp * (e * sum).real());
}

namespace detail {

// Si and Ci in one pass via E1(ix): modified Lentz continued fraction for the
// complex exponential integral, good to ~1e-15 for x >= 2.
inline void sici_cf(double x, double& si_out, double& ci_out) {
    using C = std::complex<double>;
    const C one{1.0, 0.0};
    C b{1.0, x};
    C c{1.0 / std::numeric_limits<double>::min(), 0.0};
    C d = one / b;
    C h = d;
    for (int i = 2; i <= 400; ++i) {
        const double a = -(double)(i - 1) * (double)(i - 1);
        b += 2.0;
        d = one / (a * d + b);
        c = b + a / c;
        const C del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-17) break;
    }
    h *= C{std::cos(x), -std::sin(x)};
    ci_out = -h.real();
    si_out = 0.5 * std::numbers::pi + h.imag();
}

} // namespace detail

// Sine integral Si(x) = int_0^x sin t / t dt.
inline double si(double x) {
    const double ax = std::abs(x);
    double v;
    if (ax <= 8.0) {
        const long double q = -(long double)ax * ax;
        long double term = ax, sum = ax;
        for (int k = 1; k < 40; ++k) {
            term *= q / ((2.0L * k) * (2.0L * k + 1.0L));
            sum += term / (2.0L * k + 1.0L);
            if (std::abs(term) < 1e-22L * (2 * k + 1)) break;
        }
        v = (double)sum;
    } else {
        double ci_dummy;
        detail::sici_cf(ax, v, ci_dummy);
    }
    return x < 0 ? -v : v;
}

// Cosine integral Ci(x) = gamma + log x + int_0^x (cos t - 1)/t dt, x > 0.
inline double ci(double x) {
    if (!(x > 0)) throw std::domain_error("ci: requires x > 0");
    if (x <= 8.0) {
        constexpr long double euler_gamma = 0.577215664901532860606512090082L;
        const long double q = -(long double)x * x;
        long double term = 1.0L, sum = 0.0L;
        for (int k = 1; k < 40; ++k) {
            term *= q / ((2.0L * k) * (2.0L * k - 1.0L));
            sum += term / (2.0L * k);
            if (std::abs(term) < 1e-22L * 2 * k) break;
        }
        return (double)(euler_gamma + std::log((long double)x) + sum);
    }
    double si_dummy, v;
    detail::sici_cf(x, si_dummy, v);
    return v;
}

// Fourier transform of max(-log|x|, 0): c_hat(k) = 2 Si(k)/k, c_hat(0) = 2.
// Nonnegative, ~ pi/k for large k.
inline double c_hat(double k) {
    if (k < 0) throw std::domain_error("c_hat: requires k >= 0");
    if (k < 1e-8) return 2.0 - k * k / 9.0;
    return 2.0 * si(k) / k;
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

} // namespace zeta_chaos
