#pragma once

// Prime generation (segmented Eratosthenes) and logarithmic-integral
// machinery: the offset integral Li(x) = int_2^x dt/log t, its inverse, and
// the prime-number-theorem error profile |p_n - Li^{-1}(n)| / (n e^{-sqrt(log n)}).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zeta_chaos/pairwise.hpp"
#include "zeta_chaos/quadrature.hpp"

namespace zeta_chaos {

struct PrimeTable {
    std::vector<std::uint64_t> primes;   // p_1..p_N, increasing
    std::vector<double> log_p;           // log p_j
    std::vector<double> inv_sqrt_p;      // p_j^{-1/2}
    std::vector<double> inv_p_prefix;    // inv_p_prefix[j] = sum_{i<=j} 1/p_i, [0] = 0

    std::size_t count() const { return primes.size(); }
    // 1-based accessors matching the index convention of the formulas.
    std::uint64_t p(std::size_t j) const { return primes[j - 1]; }
    double sum_inv_p(std::size_t n) const { return inv_p_prefix[n]; }
};

namespace detail {

// Upper bound on p_n: n (log n + log log n) for n >= 6 (Rosser-Schoenfeld).
inline std::uint64_t nth_prime_upper_bound(std::size_t n) {
    if (n < 6) return 15;
    const double x = (double)n;
    return (std::uint64_t)(x * (std::log(x) + std::log(std::log(x)))) + 8;
}

// Segmented sieve over [2, limit]; calls out(p) for each prime in order.
template <typename Out>
void sieve_range(std::uint64_t limit, Out&& out) {
    const std::uint64_t root = (std::uint64_t)std::sqrt((double)limit) + 1;
    std::vector<char> small(root + 1, 1);
    std::vector<std::uint64_t> base;
    for (std::uint64_t i = 2; i <= root; ++i) {
        if (!small[i]) continue;
        if (i <= limit) out(i);
        base.push_back(i);
        for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
    }
    const std::uint64_t seg = 1 << 18;
    std::vector<char> mark(seg);
    for (std::uint64_t lo = root + 1; lo <= limit; lo += seg) {
        const std::uint64_t hi = std::min(limit, lo + seg - 1);
        std::fill(mark.begin(), mark.begin() + (hi - lo + 1), 1);
        for (std::uint64_t p : base) {
            if (p * p > hi) break;
            const std::uint64_t start = ((lo + p - 1) / p) * p;
            for (std::uint64_t j = start; j <= hi; j += p) mark[j - lo] = 0;
        }
        for (std::uint64_t v = lo; v <= hi; ++v)
            if (mark[v - lo]) out(v);
    }
}

inline constexpr char kCacheMagic[8] = {'Z', 'C', 'P', 'R', 'I', 'M', 'E', 'S'};

inline std::filesystem::path cache_path(std::size_t n_primes) {
    const char* dir = std::getenv("ZETA_CHAOS_CACHE");
    if (!dir || !*dir) return {};
    return std::filesystem::path(dir) / ("primes_" + std::to_string(n_primes) + ".bin");
}

inline bool load_prime_cache(std::size_t n_primes, std::vector<std::uint64_t>& primes) {
    const auto path = cache_path(n_primes);
    if (path.empty() || !std::filesystem::exists(path)) return false;
    std::ifstream in(path, std::ios::binary);
    char magic[8];
    std::uint64_t count = 0;
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(&count), 8);
    if (!in || std::memcmp(magic, kCacheMagic, 8) != 0 || count != n_primes) return false;
    primes.resize(count);
    in.read(reinterpret_cast<char*>(primes.data()), (std::streamsize)(count * 8));
    return bool(in);
}

inline void store_prime_cache(std::size_t n_primes, const std::vector<std::uint64_t>& primes) {
    const auto path = cache_path(n_primes);
    if (path.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream outp(path, std::ios::binary);
    const std::uint64_t count = n_primes;
    outp.write(kCacheMagic, 8);
    outp.write(reinterpret_cast<const char*>(&count), 8);
    outp.write(reinterpret_cast<const char*>(primes.data()), (std::streamsize)(count * 8));
}

} // namespace detail

// Streaming access to every prime in (lo, hi]; nothing is stored.
template <typename Out>
void for_primes_up_to(std::uint64_t limit, Out&& out) {
    detail::sieve_range(limit, std::forward<Out>(out));
}

inline PrimeTable build_prime_table(std::size_t n_primes,
                                    std::uint64_t memory_cap_bytes = (2ull << 30)) {
    if (n_primes < 1) throw std::invalid_argument("build_prime_table: n_primes >= 1 required");
    PrimeTable t;
    if (!detail::load_prime_cache(n_primes, t.primes)) {
        const std::uint64_t bound = detail::nth_prime_upper_bound(n_primes);
        // sieve memory: base primes to sqrt(bound) + one segment; the table
        // itself is the dominant allocation.
        if (n_primes * 32ull > memory_cap_bytes)
            throw std::length_error("build_prime_table: table exceeds memory cap");
        t.primes.reserve(n_primes);
        try {
            detail::sieve_range(bound, [&](std::uint64_t p) {
                if (t.primes.size() < n_primes) t.primes.push_back(p);
            });
        } catch (const std::bad_alloc&) {
            throw std::length_error("build_prime_table: sieve exceeds memory cap");
        }
        if (t.primes.size() < n_primes)
            throw std::runtime_error("build_prime_table: sieve bound too small");
        detail::store_prime_cache(n_primes, t.primes);
    }
    t.log_p.resize(n_primes);
    t.inv_sqrt_p.resize(n_primes);
    t.inv_p_prefix.resize(n_primes + 1);
    t.inv_p_prefix[0] = 0.0;
    for (std::size_t j = 0; j < n_primes; ++j) {
        const double p = (double)t.primes[j];
        t.log_p[j] = std::log(p);
        t.inv_sqrt_p[j] = 1.0 / std::sqrt(p);
        t.inv_p_prefix[j + 1] = t.inv_p_prefix[j] + 1.0 / p;
    }
    return t;
}

// Offset logarithmic integral Li(x) = int_2^x dt/log t, Li(2) = 0.
inline double li(double x) {
    if (!(x >= 2.0)) throw std::domain_error("li: requires x >= 2");
    if (x == 2.0) return 0.0;
    return integrate([](double t) { return 1.0 / std::log(t); }, 2.0, x, 1e-11);
}

// Inverse of the offset Li on [0, inf): Newton with derivative 1/log x,
// bisection fallback if the iteration oscillates.
inline double li_inverse(double y) {
    if (!(y >= 0.0)) throw std::domain_error("li_inverse: requires y >= 0");
    if (y == 0.0) return 2.0;
    double x = std::max(2.5, y * std::log(std::max(y, 3.0)));
    double fx = li(x) - y;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(fx) < 1e-9) return x;
        double step = -fx * std::log(x);
        double xn = x + step;
        if (xn < 2.0) xn = 0.5 * (x + 2.0);
        const double fn = li(xn) - y;
        if (std::abs(fn) > std::abs(fx)) {
            // oscillation: bisect on a bracket that always contains the root
            double lo = 2.0, hi = std::max(xn, 3.0 * y * std::log(y + 3.0) + 4.0);
            for (int b = 0; b < 200 && hi - lo > 1e-12 * hi; ++b) {
                const double mid = 0.5 * (lo + hi);
                if (li(mid) - y < 0)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        x = xn;
        fx = fn;
    }
    throw std::runtime_error("li_inverse: Newton failed to converge");
}

// Li^{-1}(1..n) computed sequentially; each step reuses the running value of
// Li at the previous root, so the whole table costs O(n) short quadratures.
class LiInverseTable {
  public:
    explicit LiInverseTable(std::size_t n) : x_(n + 1) {
        x_[0] = 2.0;
        double li_acc = 0.0;  // Li at current x
        double x = 2.0;
        for (std::size_t j = 1; j <= n; ++j) {
            const double target = (double)j;
            for (int it = 0; it < 100; ++it) {
                const double resid = li_acc - target;
                if (std::abs(resid) < 1e-10) break;
                double xn = x - resid * std::log(x);
                if (xn < 2.0) xn = 0.5 * (x + 2.0);
                li_acc += integrate([](double t) { return 1.0 / std::log(t); },
                                    x, xn, 1e-13);
                x = xn;
            }
            x_[j] = x;
        }
    }
    double operator[](std::size_t j) const { return x_[j]; }  // Li^{-1}(j)
    std::size_t size() const { return x_.size() - 1; }

  private:
    std::vector<double> x_;
};

// Scaled PNT errors at the sampled indices.
inline std::vector<std::pair<std::size_t, double>>
pnt_error_profile(const PrimeTable& table, const std::vector<std::size_t>& sample_indices) {
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(sample_indices.size());
    for (std::size_t n : sample_indices) {
        if (n < 1 || n > table.count())
            throw std::out_of_range("pnt_error_profile: index outside table");
        const double pn = (double)table.p(n);
        const double err = std::abs(pn - li_inverse((double)n));
        const double scale = (double)n * std::exp(-std::sqrt(std::log((double)n)));
        out.emplace_back(n, err / scale);
    }
    return out;
}

} // namespace zeta_chaos
