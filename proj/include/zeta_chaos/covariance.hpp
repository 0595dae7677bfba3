#pragma once

// Exact and asymptotic covariance kernels.
//
//   psi_N(u) = 1/2 sum_{j<=N} cos(u log p_j) / p_j
//
// is the common covariance of the phase field and its Gaussian approximation.
// The N -> infinity limit is computed by two independent routes:
//   prime route:  psi_N plus a tail from the prime-density integral,
//   zeta route:   1/2 Re( log zeta(1+iu) - A(u) ),
//                 A(u) = sum_{k>=2} sum_p k^{-1} p^{-k(1+iu)}.
// Their agreement to 1e-5 on [0.1, 2] is the module's central check.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "zeta_chaos/field.hpp"
#include "zeta_chaos/pairwise.hpp"
#include "zeta_chaos/primes.hpp"
#include "zeta_chaos/special.hpp"

namespace zeta_chaos {

inline double psi_n(const PrimeTable& table, std::size_t n_use, double u) {
    if (n_use > table.count()) throw std::invalid_argument("psi_n: n_use exceeds table");
    return 0.5 * pairwise_sum(std::size_t{0}, n_use, [&](std::size_t j) {
               return std::cos(u * table.log_p[j]) / (double)table.primes[j];
           });
}

// psi_N on the uniform grid u0 + k du, k = 0..K-1, via the per-prime rotation
// recurrence (one trig pair per prime instead of K).
inline std::vector<double> psi_n_grid(const PrimeTable& table, std::size_t n_use, double u0,
                                      double du, std::size_t K) {
    if (n_use > table.count()) throw std::invalid_argument("psi_n_grid: n_use exceeds table");
    std::vector<double> out(K, 0.0);
    for (std::size_t j = 0; j < n_use; ++j)
        detail::add_cosine_track(table.log_p[j], 0.5 / (double)table.primes[j], 0.0, u0, du,
                                 K, out.data());
    return out;
}

struct KernelBoundCheck {
    double c_log_pn = 0;  // "log N" read as log p_N (default interpretation)
    double c_log_n = 0;   // literal log N, reported alongside
};

// C = max over the lag grid of |psi_N(u) - 1/2 log min(1/|u|, L)|.
inline KernelBoundCheck kernel_bound_check(const PrimeTable& table, std::size_t n_use,
                                           const std::vector<double>& u_grid) {
    if (u_grid.empty()) throw std::invalid_argument("kernel_bound_check: empty grid");
    bool uniform = u_grid.size() >= 2;
    const double du = uniform ? u_grid[1] - u_grid[0] : 0.0;
    for (std::size_t i = 1; uniform && i + 1 < u_grid.size(); ++i)
        if (std::abs(u_grid[i + 1] - u_grid[i] - du) > 1e-12) uniform = false;
    std::vector<double> psi;
    if (uniform)
        psi = psi_n_grid(table, n_use, u_grid[0], du, u_grid.size());
    else {
        psi.reserve(u_grid.size());
        for (double u : u_grid) psi.push_back(psi_n(table, n_use, u));
    }
    const double log_pn = table.log_p[n_use - 1];
    const double log_n = std::log((double)n_use);
    KernelBoundCheck r;
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        const double u = std::abs(u_grid[i]);
        if (!(u > 0.0 && u <= 1.0))
            throw std::invalid_argument("kernel_bound_check: grid must lie in (0, 1]");
        r.c_log_pn = std::max(r.c_log_pn,
                              std::abs(psi[i] - 0.5 * std::log(std::min(1.0 / u, log_pn))));
        r.c_log_n = std::max(r.c_log_n,
                             std::abs(psi[i] - 0.5 * std::log(std::min(1.0 / u, log_n))));
    }
    return r;
}

// ---------------------------------------------------------------------------
// zeta route
// ---------------------------------------------------------------------------

namespace detail {

// Alternating-series (eta function) evaluation with Cohen-Rodriguez-Zagier
// binomial acceleration; the error decays like (3+sqrt(8))^{-n}.
inline std::complex<double> eta_cvz(std::complex<double> s, int n = 64) {
    double d = std::pow(3.0 + 2.0 * std::numbers::sqrt2, n);
    d = 0.5 * (d + 1.0 / d);
    double b = -1.0, c = -d;
    std::complex<double> acc = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        acc += c * std::exp(-s * std::log((double)(k + 1)));
        b *= ((double)k + n) * ((double)k - n) / (((double)k + 0.5) * ((double)k + 1.0));
    }
    return acc / d;
}

// Euler-Maclaurin zeta for Re s >= 2 (|Im s| up to ~100 with M = 64).
inline std::complex<double> zeta_em(std::complex<double> s) {
    constexpr int M = 64;
    constexpr double b2k_over_fact[8] = {
        1.0 / 12.0,                 // B2/2!
        -1.0 / 720.0,               // B4/4!
        1.0 / 30240.0,              // B6/6!
        -1.0 / 1209600.0,           // B8/8!
        1.0 / 47900160.0,           // B10/10!
        -691.0 / 1307674368000.0,   // B12/12!
        1.0 / 74724249600.0,        // B14/14!
        -3617.0 / 10670622842880000.0};  // B16/16!
    std::complex<double> sum = 0.0;
    for (int m = 1; m < M; ++m) sum += std::exp(-s * std::log((double)m));
    const double logM = std::log((double)M);
    const std::complex<double> Mms = std::exp(-s * logM);  // M^{-s}
    sum += Mms * (double)M / (s - 1.0) + 0.5 * Mms;
    std::complex<double> pref = Mms / (double)M;  // M^{-s-1}
    std::complex<double> rising = s;              // s (s+1) ... running product
    for (int k = 1; k <= 8; ++k) {
        sum += b2k_over_fact[k - 1] * rising * pref;
        // advance M^{-s-2k+1} and the rising factorial by two
        pref /= (double)(M * M);
        rising *= (s + (double)(2 * k - 1)) * (s + (double)(2 * k));
    }
    return sum;
}

inline constexpr int kMobius[26] = {0, 1, -1, -1, 0, -1, 1, -1, 0,  0, 1, -1, 0,
                                    -1, 1, 1,  0, -1, 0, -1, 0, 1, 1, -1, 0, 0};

// Prime zeta P(s) = sum_p p^{-s} for Re s >= 2, by Moebius inversion of
// log zeta: P(s) = sum_n mu(n)/n log zeta(ns).
inline std::complex<double> prime_zeta(std::complex<double> s) {
    std::complex<double> acc = 0.0;
    for (int n = 1; n <= 25; ++n) {
        if (kMobius[n] == 0) continue;
        if ((double)n * s.real() > 52.0) break;
        const std::complex<double> z = zeta_em((double)n * s);
        acc += (double)kMobius[n] / (double)n * std::log(z);
    }
    return acc;
}

} // namespace detail

// zeta(1 + iu) on the pole-free segment 0 < |u| <= 4.
inline std::complex<double> zeta_1_plus_iu(double u) {
    if (u == 0.0) throw std::domain_error("zeta_1_plus_iu: pole at u = 0");
    if (!(std::abs(u) <= 4.0))
        throw std::domain_error("zeta_1_plus_iu: |u| <= 4 required");
    const std::complex<double> s{1.0, u};
    const std::complex<double> eta = detail::eta_cvz(s);
    const std::complex<double> denom =
        1.0 - std::exp((1.0 - s) * std::numbers::ln2);  // 1 - 2^{1-s}
    return eta / denom;
}

// A(u) = sum_{k>=2} sum_p k^{-1} p^{-k(1+iu)}, absolutely convergent; computed
// by prime-zeta resummation with all truncation tails below 1e-12.
inline std::complex<double> a_double_sum(double u) {
    std::complex<double> acc = 0.0;
    const std::complex<double> base{1.0, u};
    for (int k = 2; k <= 48; ++k) acc += detail::prime_zeta((double)k * base) / (double)k;
    return acc;
}

enum class LimitRoute { prime_sum, zeta };

// Limit kernel, zeta route: 1/2 Re(log zeta(1+iu) - A(u)).  Re log zeta is
// log|zeta|, which needs no branch choice.
inline double psi_limit_zeta(double u) {
    if (u == 0.0) throw std::domain_error("psi_limit_zeta: u != 0 required");
    const double au = std::abs(u);
    if (!(au <= 2.0)) throw std::domain_error("psi_limit_zeta: |u| <= 2 required");
    return 0.5 * (std::log(std::abs(zeta_1_plus_iu(au))) - a_double_sum(au).real());
}

// Prime route: psi_N plus tail.  Writing pi(t) = Li(t) + E(t), the tail
// sum_{p > X} cos(u log p)/(2p) becomes
//   -Ci(u log X)/2 - cos(u log X) E(X) / (2X) - 1/2 int_X^inf E f',
// and the last term is dropped.  E(X) = pi(X) - Li(X) is exact here.
inline double psi_limit_prime(const PrimeTable& table, std::size_t n_use, double u) {
    if (u == 0.0) throw std::domain_error("psi_limit_prime: u != 0 required");
    const double au = std::abs(u);
    const double X = (double)table.p(n_use);
    const double L = std::log(X);
    const double boundary = -0.5 * std::cos(au * L) / X * ((double)n_use - li(X));
    return psi_n(table, n_use, au) - 0.5 * ci(au * L) + boundary;
}

// Prime route sharpened by exact partial summation up to x_extend (streamed
// sieve, nothing stored), then the same density tail at x_extend.
inline std::vector<double> psi_limit_prime_refined(const PrimeTable& table,
                                                   const std::vector<double>& us,
                                                   std::uint64_t x_extend = 1000000000ull) {
    const std::size_t n = table.count();
    const std::uint64_t p_last = table.p(n);
    if (x_extend < p_last) throw std::invalid_argument("psi_limit_prime_refined: x_extend < p_N");
    std::vector<double> acc(us.size(), 0.0);
    std::uint64_t count_beyond = 0;
    for_primes_up_to(x_extend, [&](std::uint64_t p) {
        if (p <= p_last) return;
        ++count_beyond;
        const double lp = std::log((double)p), ip = 0.5 / (double)p;
        for (std::size_t i = 0; i < us.size(); ++i) acc[i] += ip * std::cos(us[i] * lp);
    });
    const double X = (double)x_extend;
    const double L = std::log(X);
    const double EX = (double)(n + count_beyond) - li(X);
    std::vector<double> out(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
        const double au = std::abs(us[i]);
        if (au == 0.0) throw std::domain_error("psi_limit_prime_refined: u != 0 required");
        out[i] = psi_n(table, n, au) + acc[i] - 0.5 * ci(au * L) -
                 0.5 * std::cos(au * L) / X * EX;
    }
    return out;
}

inline double psi_limit(const PrimeTable& table, double u, LimitRoute route) {
    return route == LimitRoute::zeta ? psi_limit_zeta(u)
                                     : psi_limit_prime(table, table.count(), u);
}

// g(u) = psi_limit(u) - 1/2 log(1/|u|)
inline double g_of_u(double u) { return psi_limit_zeta(u) - 0.5 * std::log(1.0 / std::abs(u)); }

// ---------------------------------------------------------------------------
// Normalization constants of the exponential measure
// ---------------------------------------------------------------------------

struct NormalizationConstants {
    std::size_t n_primes = 0;
    double beta = 0;
    double log_norm_exact = 0;     // sum_j log I0(beta / sqrt(p_j))
    double log_norm_gaussian = 0;  // (beta^2/4) sum_j 1/p_j
};

// E exp(lambda cos(theta - phi)) = I0(lambda) for uniform theta, so the exact
// per-realization normalization is the I0 product; the Gaussian counterpart
// differs by O(1) uniformly in N.
inline NormalizationConstants normalization(const PrimeTable& table, std::size_t n_use,
                                            double beta) {
    if (!(beta >= 0)) throw std::invalid_argument("normalization: beta >= 0 required");
    NormalizationConstants c;
    c.n_primes = n_use;
    c.beta = beta;
    c.log_norm_exact = pairwise_sum(std::size_t{0}, n_use, [&](std::size_t j) {
        return log_bessel_i0(beta * table.inv_sqrt_p[j]);
    });
    c.log_norm_gaussian = 0.25 * beta * beta * table.inv_p_prefix[n_use];
    return c;
}

} // namespace zeta_chaos
