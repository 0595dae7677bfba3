#pragma once

// Sampling and grid evaluation of the random Euler-product field, its
// Gaussian counterpart, the block decomposition with frozen variants, and the
// two error fields of the block coupling.
//
//   X_n(x) = sum_{j<=n} p_j^{-1/2} cos(x log p_j - theta_j)
//   G_n(x) = sum_{j<=n} (2 p_j)^{-1/2} (W1_j cos(x log p_j) + W2_j sin(x log p_j))
//
// Per-prime evaluation across a uniform grid uses a rotation recurrence with
// angle step log(p_j) * h, re-synchronized against direct trig every 1024
// steps so accumulated drift stays below 1e-10 per prime.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zeta_chaos/primes.hpp"
#include "zeta_chaos/rng.hpp"

namespace zeta_chaos {

struct PhaseVector {
    std::size_t n_primes = 0;
    std::vector<double> theta;      // in [0, 2 pi)
    std::uint64_t seed = 0, stream_id = 0;
};

struct GaussianDraws {
    std::size_t n_primes = 0;
    std::vector<double> w1, w2;     // i.i.d. standard normal
    std::uint64_t seed = 0, stream_id = 0;
};

enum class FieldLabel { X, G, Ym, Zm, YmTilde, ZmTilde, E1, E2, ETotal };

struct FieldGrid {
    std::size_t grid_size = 0;      // M points, value[k] = field(k/(M-1))
    std::vector<double> values;
    FieldLabel label = FieldLabel::X;
    std::size_t n_primes = 0;       // primes used, or block index for block labels
    double x_at(std::size_t k) const { return (double)k / (double)(grid_size - 1); }
};

inline PhaseVector sample_phases(const PrimeTable& table, std::uint64_t seed,
                                 std::uint64_t stream_id) {
    PhaseVector v{table.count(), {}, seed, stream_id};
    v.theta.resize(v.n_primes);
    for (std::size_t j = 0; j < v.n_primes; ++j)
        v.theta[j] = uniform_phase(seed, stream_id, j);
    return v;
}

inline GaussianDraws sample_gaussian_draws(const PrimeTable& table, std::uint64_t seed,
                                           std::uint64_t stream_id) {
    GaussianDraws d{table.count(), {}, {}, seed, stream_id};
    d.w1.resize(d.n_primes);
    d.w2.resize(d.n_primes);
    for (std::size_t j = 0; j < d.n_primes; ++j) {
        const auto z = normal_pair(seed, stream_id, j);
        d.w1[j] = z[0];
        d.w2[j] = z[1];
    }
    return d;
}

namespace detail {

inline constexpr std::size_t kResyncStride = 1024;

// out[k] += amp * cos((x0 + k h) w - shift), k = 0..K-1
inline void add_cosine_track(double w, double amp, double shift, double x0, double h,
                             std::size_t K, double* out) {
    const double dc = std::cos(w * h), ds = std::sin(w * h);
    double c = 0, s = 0;
    for (std::size_t k = 0; k < K; ++k) {
        if (k % kResyncStride == 0) {
            const double a = (x0 + (double)k * h) * w - shift;
            c = std::cos(a);
            s = std::sin(a);
        }
        out[k] += amp * c;
        const double cn = c * dc - s * ds;
        s = s * dc + c * ds;
        c = cn;
    }
}

// out[k] += amp * (w1 cos((x0 + k h) w) + w2 sin((x0 + k h) w))
inline void add_mixed_track(double w, double amp, double w1, double w2, double x0,
                            double h, std::size_t K, double* out) {
    const double dc = std::cos(w * h), ds = std::sin(w * h);
    double c = 0, s = 0;
    for (std::size_t k = 0; k < K; ++k) {
        if (k % kResyncStride == 0) {
            const double a = (x0 + (double)k * h) * w;
            c = std::cos(a);
            s = std::sin(a);
        }
        out[k] += amp * (w1 * c + w2 * s);
        const double cn = c * dc - s * ds;
        s = s * dc + c * ds;
        c = cn;
    }
}

// Phase-field partial sum over prime indices [first,last] (1-based) on a
// uniform grid starting at x0 with step h.
inline void accumulate_phase_field(const PrimeTable& t, std::size_t first, std::size_t last,
                                   std::span<const double> theta, double x0, double h,
                                   std::size_t K, double* out) {
    for (std::size_t j = first; j <= last; ++j)
        add_cosine_track(t.log_p[j - 1], t.inv_sqrt_p[j - 1], theta[j - 1], x0, h, K, out);
}

inline void accumulate_gaussian_field(const PrimeTable& t, std::size_t first, std::size_t last,
                                      std::span<const double> w1, std::span<const double> w2,
                                      double x0, double h, std::size_t K, double* out) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    for (std::size_t j = first; j <= last; ++j)
        add_mixed_track(t.log_p[j - 1], t.inv_sqrt_p[j - 1] * inv_sqrt2, w1[j - 1], w2[j - 1],
                        x0, h, K, out);
}

} // namespace detail

inline FieldGrid eval_field(const PhaseVector& phases, const PrimeTable& table,
                            std::size_t n_use, std::size_t grid_size) {
    if (grid_size < 2) throw std::invalid_argument("eval_field: grid_size >= 2 required");
    if (n_use > phases.n_primes || n_use > table.count())
        throw std::invalid_argument("eval_field: n_use exceeds available primes");
    FieldGrid g{grid_size, std::vector<double>(grid_size, 0.0), FieldLabel::X, n_use};
    if (n_use > 0)
        detail::accumulate_phase_field(table, 1, n_use, phases.theta, 0.0,
                                       1.0 / (double)(grid_size - 1), grid_size,
                                       g.values.data());
    return g;
}

inline FieldGrid eval_gaussian_field(const GaussianDraws& draws, const PrimeTable& table,
                                     std::size_t n_use, std::size_t grid_size) {
    if (grid_size < 2) throw std::invalid_argument("eval_gaussian_field: grid_size >= 2 required");
    if (n_use > draws.n_primes || n_use > table.count())
        throw std::invalid_argument("eval_gaussian_field: n_use exceeds available primes");
    FieldGrid g{grid_size, std::vector<double>(grid_size, 0.0), FieldLabel::G, n_use};
    if (n_use > 0)
        detail::accumulate_gaussian_field(table, 1, n_use, draws.w1, draws.w2, 0.0,
                                          1.0 / (double)(grid_size - 1), grid_size,
                                          g.values.data());
    return g;
}

// Direct evaluation at arbitrary points (no recurrence).
inline std::vector<double> eval_field_at(const PhaseVector& phases, const PrimeTable& table,
                                         std::size_t n_use, std::span<const double> points) {
    std::vector<double> out(points.size(), 0.0);
    for (std::size_t j = 0; j < n_use; ++j) {
        const double lp = table.log_p[j], amp = table.inv_sqrt_p[j], th = phases.theta[j];
        for (std::size_t i = 0; i < points.size(); ++i)
            out[i] += amp * std::cos(points[i] * lp - th);
    }
    return out;
}

inline std::vector<double> eval_gaussian_field_at(const GaussianDraws& draws,
                                                  const PrimeTable& table, std::size_t n_use,
                                                  std::span<const double> points) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    std::vector<double> out(points.size(), 0.0);
    for (std::size_t j = 0; j < n_use; ++j) {
        const double lp = table.log_p[j], amp = table.inv_sqrt_p[j] * inv_sqrt2;
        for (std::size_t i = 0; i < points.size(); ++i)
            out[i] += amp * (draws.w1[j] * std::cos(points[i] * lp) +
                             draws.w2[j] * std::sin(points[i] * lp));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Block schedule r_m = floor(exp(m^alpha)), strictified
// ---------------------------------------------------------------------------

struct Block {
    std::size_t first = 0, last = 0;  // 1-based prime indices, inclusive
    std::size_t size() const { return last - first + 1; }
};

struct BlockValidity {
    bool gap_ok = false;    // r_{m+1} - r_m >= 2
    bool ratio_ok = false;  // p_{r_{m+1}-1} / p_{r_m} <= 2
};

struct BlockSchedule {
    double alpha = 0.0;
    std::vector<std::size_t> cuts;         // r_1 = 1 < r_2 < ...
    std::vector<BlockValidity> validity;   // per block
    std::size_t block_count() const { return cuts.empty() ? 0 : cuts.size() - 1; }
    Block block(std::size_t m) const {     // 1-based block index
        if (m < 1 || m > block_count()) throw std::out_of_range("BlockSchedule::block");
        return Block{cuts[m - 1], cuts[m] - 1};
    }
};

// Raw cuts floor(exp(m^alpha)) are deduplicated, r_1 is forced to 1, and
// blocks are merged greedily until every retained block has gap >= 2 and
// prime ratio <= 2.
inline BlockSchedule build_block_schedule(double alpha, const PrimeTable& table) {
    if (!(alpha > 0.0 && alpha < 0.4))
        throw std::invalid_argument("build_block_schedule: alpha must lie in (0, 2/5)");
    const std::size_t n = table.count();
    BlockSchedule sched;
    sched.alpha = alpha;
    sched.cuts.push_back(1);
    std::size_t prev_raw = 1;
    for (std::size_t m = 1;; ++m) {
        const double v = std::exp(std::pow((double)m, alpha));
        if (v > (double)(n + 1) + 0.5) break;
        const std::size_t r = (std::size_t)v;
        if (r <= prev_raw || r > n + 1) {
            prev_raw = std::max(prev_raw, r);
            continue;
        }
        prev_raw = r;
        const std::size_t back = sched.cuts.back();
        if (r - back < 2) continue;  // merge: gap too small
        if ((double)table.p(r - 1) / (double)table.p(back) > 2.0) continue;  // merge
        sched.cuts.push_back(r);
    }
    sched.validity.resize(sched.block_count());
    for (std::size_t m = 1; m <= sched.block_count(); ++m) {
        const Block b = sched.block(m);
        sched.validity[m - 1].gap_ok = (sched.cuts[m] - sched.cuts[m - 1]) >= 2;
        sched.validity[m - 1].ratio_ok =
            (double)table.p(b.last) / (double)table.p(b.first) <= 2.0;
    }
    return sched;
}

// ---------------------------------------------------------------------------
// Blocks, frozen blocks, conditional fill, error fields
// ---------------------------------------------------------------------------

struct BlockSample {
    std::size_t m = 0;
    double C = 0, S = 0;     // block cosine/sine sums
    double b = 0;            // b_m = sqrt(1/2 sum_block 1/p)
    double v1 = 0, v2 = 0;   // coupled (or derived) Gaussian pair
    bool coupled = false;
};

inline double block_b(const PrimeTable& table, const Block& blk) {
    return std::sqrt(0.5 * (table.inv_p_prefix[blk.last] - table.inv_p_prefix[blk.first - 1]));
}

inline std::pair<FieldGrid, BlockSample>
eval_block(const PhaseVector& phases, const PrimeTable& table, const BlockSchedule& sched,
           std::size_t m, std::size_t grid_size, bool frozen) {
    const Block blk = sched.block(m);
    BlockSample bs;
    bs.m = m;
    bs.b = block_b(table, blk);
    for (std::size_t j = blk.first; j <= blk.last; ++j) {
        bs.C += table.inv_sqrt_p[j - 1] * std::cos(phases.theta[j - 1]);
        bs.S += table.inv_sqrt_p[j - 1] * std::sin(phases.theta[j - 1]);
    }
    FieldGrid g{grid_size, std::vector<double>(grid_size, 0.0),
                frozen ? FieldLabel::YmTilde : FieldLabel::Ym, m};
    const double h = 1.0 / (double)(grid_size - 1);
    if (frozen) {
        const double lp0 = table.log_p[blk.first - 1];
        for (std::size_t k = 0; k < grid_size; ++k) {
            const double x = (double)k * h;
            g.values[k] = std::cos(x * lp0) * bs.C + std::sin(x * lp0) * bs.S;
        }
    } else {
        detail::accumulate_phase_field(table, blk.first, blk.last, phases.theta, 0.0, h,
                                       grid_size, g.values.data());
    }
    return {std::move(g), bs};
}

inline std::pair<FieldGrid, BlockSample>
eval_block(const GaussianDraws& draws, const PrimeTable& table, const BlockSchedule& sched,
           std::size_t m, std::size_t grid_size, bool frozen) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    const Block blk = sched.block(m);
    BlockSample bs;
    bs.m = m;
    bs.b = block_b(table, blk);
    double s1 = 0, s2 = 0;  // sum (2p)^{-1/2} W^{(i)}
    for (std::size_t j = blk.first; j <= blk.last; ++j) {
        const double a = table.inv_sqrt_p[j - 1] * inv_sqrt2;
        s1 += a * draws.w1[j - 1];
        s2 += a * draws.w2[j - 1];
    }
    bs.v1 = s1 / bs.b;
    bs.v2 = s2 / bs.b;
    FieldGrid g{grid_size, std::vector<double>(grid_size, 0.0),
                frozen ? FieldLabel::ZmTilde : FieldLabel::Zm, m};
    const double h = 1.0 / (double)(grid_size - 1);
    if (frozen) {
        const double lp0 = table.log_p[blk.first - 1];
        for (std::size_t k = 0; k < grid_size; ++k) {
            const double x = (double)k * h;
            g.values[k] = bs.b * (std::cos(x * lp0) * bs.v1 + std::sin(x * lp0) * bs.v2);
        }
    } else {
        detail::accumulate_gaussian_field(table, blk.first, blk.last, draws.w1, draws.w2,
                                          0.0, h, grid_size, g.values.data());
    }
    return {std::move(g), bs};
}

struct ConditionalFill {
    std::vector<double> w1, w2;  // per-prime standard normals satisfying the block sums
};

// Standard normal vectors conditioned on sum_j (2 p_j)^{-1/2} W^{(i)}_j = s_i:
// W = Z + a (s - a.Z)/|a|^2 with a_j = (2 p_j)^{-1/2}.  The marginals stay
// standard normal when the targets carry the block law b_m * N(0,1).
inline ConditionalFill gaussian_conditional_fill(const PrimeTable& table, const Block& blk,
                                                 double s1, double s2, std::uint64_t seed,
                                                 std::uint64_t stream_id) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    const std::size_t n = blk.size();
    ConditionalFill f;
    f.w1.resize(n);
    f.w2.resize(n);
    const std::uint64_t sub = mix_stream(stream_id, 0xC0FD17ull + blk.first);
    double a2 = 0, d1 = 0, d2 = 0;
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = table.inv_sqrt_p[blk.first - 1 + i] * inv_sqrt2;
        a2 += a[i] * a[i];
        const auto z = normal_pair(seed, sub, i);
        f.w1[i] = z[0];
        f.w2[i] = z[1];
        d1 += a[i] * z[0];
        d2 += a[i] * z[1];
    }
    const double c1 = (s1 - d1) / a2, c2 = (s2 - d2) / a2;
    for (std::size_t i = 0; i < n; ++i) {
        f.w1[i] += a[i] * c1;
        f.w2[i] += a[i] * c2;
    }
    return f;
}

struct CoupledBlockRealization {
    BlockSample sample;      // with (v1, v2) assigned
    ConditionalFill fill;    // per-prime W draws matching b_m (v1, v2)
};

struct ErrorFields {
    FieldGrid e1, e2, total;
    double sup_e1 = 0, sup_e2 = 0, sup_total = 0;
};

// E1_n = sum_{m<=n} (Ytilde_m - Ztilde_m),
// E2_n = sum_{m<=n} (Y_m - Ytilde_m + Ztilde_m - Z_m).
inline ErrorFields error_fields(const PhaseVector& phases, const PrimeTable& table,
                                const BlockSchedule& sched,
                                std::span<const CoupledBlockRealization> blocks,
                                std::size_t n_blocks, std::size_t grid_size) {
    if (n_blocks > sched.block_count() || n_blocks > blocks.size())
        throw std::invalid_argument("error_fields: not enough coupled blocks");
    ErrorFields ef;
    ef.e1 = FieldGrid{grid_size, std::vector<double>(grid_size, 0.0), FieldLabel::E1, n_blocks};
    ef.e2 = FieldGrid{grid_size, std::vector<double>(grid_size, 0.0), FieldLabel::E2, n_blocks};
    const double h = 1.0 / (double)(grid_size - 1);
    std::vector<double> y(grid_size), z(grid_size);
    for (std::size_t m = 1; m <= n_blocks; ++m) {
        const Block blk = sched.block(m);
        const auto& real = blocks[m - 1];
        if (real.fill.w1.size() != blk.size())
            throw std::invalid_argument("error_fields: block lacks a coupling fill");
        const auto& bs = real.sample;
        const double lp0 = table.log_p[blk.first - 1];
        std::fill(y.begin(), y.end(), 0.0);
        std::fill(z.begin(), z.end(), 0.0);
        detail::accumulate_phase_field(table, blk.first, blk.last, phases.theta, 0.0, h,
                                       grid_size, y.data());
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        for (std::size_t i = 0; i < blk.size(); ++i)
            detail::add_mixed_track(table.log_p[blk.first - 1 + i],
                                    table.inv_sqrt_p[blk.first - 1 + i] * inv_sqrt2,
                                    real.fill.w1[i], real.fill.w2[i], 0.0, h, grid_size,
                                    z.data());
        for (std::size_t k = 0; k < grid_size; ++k) {
            const double x = (double)k * h;
            const double cy = std::cos(x * lp0), sy = std::sin(x * lp0);
            const double ytil = cy * bs.C + sy * bs.S;
            const double ztil = bs.b * (cy * bs.v1 + sy * bs.v2);
            ef.e1.values[k] += ytil - ztil;
            ef.e2.values[k] += y[k] - ytil + ztil - z[k];
        }
    }
    ef.total = FieldGrid{grid_size, std::vector<double>(grid_size, 0.0), FieldLabel::ETotal,
                         n_blocks};
    for (std::size_t k = 0; k < grid_size; ++k) {
        ef.total.values[k] = ef.e1.values[k] + ef.e2.values[k];
        ef.sup_e1 = std::max(ef.sup_e1, std::abs(ef.e1.values[k]));
        ef.sup_e2 = std::max(ef.sup_e2, std::abs(ef.e2.values[k]));
        ef.sup_total = std::max(ef.sup_total, std::abs(ef.total.values[k]));
    }
    return ef;
}

} // namespace zeta_chaos
