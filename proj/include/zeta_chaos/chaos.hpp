#pragma once

// The normalized exponential measure mu_{beta,N}(dx) = e^{beta X_N(x)} dx / Z,
// its dyadic box masses, exact Bessel-product moment oracles, Monte Carlo
// moment estimation, multifractal scaling fits, the martingale check and the
// critically normalized total-mass study.
//
// With the exact normalization Z = prod_j I0(beta/sqrt(p_j)) the mean of every
// box mass is exactly its length, which turns the mean-one martingale property
// into a sharp test rather than an asymptotic one.

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "zeta_chaos/covariance.hpp"
#include "zeta_chaos/field.hpp"
#include "zeta_chaos/parallel.hpp"
#include "zeta_chaos/primes.hpp"
#include "zeta_chaos/quadrature.hpp"
#include "zeta_chaos/rng.hpp"
#include "zeta_chaos/stats.hpp"

namespace zeta_chaos {

// Tripped when a requested computation crosses a moment barrier or similar
// numeric guard; the CLI maps it to exit code 3.
struct numeric_guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NormalizationKind { exact_bessel, gaussian_form };

struct ChaosParams {
    double beta = 1.0;
    static constexpr double beta_critical = 2.0;
    std::size_t n_primes = 0;
    NormalizationKind normalization = NormalizationKind::exact_bessel;
    bool critical_factor = false;  // multiply masses by sqrt(log log N)

    double log_norm(const PrimeTable& table) const {
        const auto c = zeta_chaos::normalization(table, n_primes, beta);
        return normalization == NormalizationKind::exact_bessel ? c.log_norm_exact
                                                                : c.log_norm_gaussian;
    }
    double critical_scale() const {
        return critical_factor ? std::sqrt(std::log(std::log((double)n_primes))) : 1.0;
    }
};

struct BoxMeasure {
    int level = 0;                 // 2^level boxes on [0,1]
    std::vector<double> masses;
    ChaosParams params;
    int oversample = 0;            // log2(points per box)
};

namespace detail {

// Composite trapezoid of exp(beta v - log_norm) over [k h, (k+segments) h].
inline double box_mass(std::span<const double> v, std::size_t k0, std::size_t seg, double h,
                       double beta, double log_norm) {
    double s = 0.5 * (std::exp(beta * v[k0] - log_norm) +
                      std::exp(beta * v[k0 + seg] - log_norm));
    for (std::size_t k = k0 + 1; k < k0 + seg; ++k) s += std::exp(beta * v[k] - log_norm);
    return s * h;
}

} // namespace detail

inline BoxMeasure chaos_boxes(const FieldGrid& field, const PrimeTable& table,
                              const ChaosParams& params, int level) {
    if (field.label != FieldLabel::X)
        throw std::invalid_argument("chaos_boxes: field must carry the X label");
    const std::size_t segments = field.grid_size - 1;
    const std::size_t n_boxes = std::size_t{1} << level;
    if (segments % n_boxes != 0 || segments / n_boxes < 16)
        throw std::invalid_argument(
            "chaos_boxes: grid must provide 2^level boxes with >= 16 segments each");
    const std::size_t seg = segments / n_boxes;
    const double h = 1.0 / (double)segments;
    const double log_norm = params.log_norm(table);
    const double scale = params.critical_scale();
    BoxMeasure bm;
    bm.level = level;
    bm.params = params;
    bm.oversample = (int)std::round(std::log2((double)seg));
    bm.masses.resize(n_boxes);
    for (std::size_t b = 0; b < n_boxes; ++b)
        bm.masses[b] = scale * detail::box_mass(field.values, b * seg, seg, h, params.beta,
                                                log_norm);
    return bm;
}

// ---------------------------------------------------------------------------
// Exact moment oracles
// ---------------------------------------------------------------------------

// E exp(sum_i lambda_i X_N(x_i)) = prod_j I0(|sum_i lambda_i e^{i x_i log p_j}| / sqrt(p_j))
inline double laplace_functional_oracle(const PrimeTable& table, std::size_t n_use,
                                        std::span<const double> points,
                                        std::span<const double> lambdas) {
    if (points.size() != lambdas.size())
        throw std::invalid_argument("laplace_functional_oracle: size mismatch");
    double log_prod = 0;
    for (std::size_t j = 0; j < n_use; ++j) {
        std::complex<double> z = 0;
        for (std::size_t i = 0; i < points.size(); ++i)
            z += lambdas[i] * std::exp(std::complex<double>(0.0, points[i] * table.log_p[j]));
        log_prod += log_bessel_i0(std::abs(z) * table.inv_sqrt_p[j]);
    }
    return std::exp(log_prod);
}

// Exact two-point density of the measure at lag u:
//   rho2(u) = prod_j I0(2 beta |cos(u log p_j / 2)| / sqrt(p_j)) / I0(beta/sqrt(p_j))^2.
// The two cosine factors at one prime combine into
// 2 cos(u log p / 2) cos(mid log p - theta), and E e^{a cos} = I0(a).
inline double two_point_density(double u, const PrimeTable& table, const ChaosParams& params) {
    if (params.normalization != NormalizationKind::exact_bessel)
        throw std::invalid_argument("two_point_density: exact_bessel normalization required");
    const double beta = params.beta;
    double acc = 0;
    for (std::size_t j = 0; j < params.n_primes; ++j) {
        const double isp = table.inv_sqrt_p[j];
        const double a = 2.0 * beta * std::abs(std::cos(0.5 * u * table.log_p[j])) * isp;
        acc += log_bessel_i0(a) - 2.0 * log_bessel_i0(beta * isp);
    }
    return std::exp(acc);
}

// E mu([x, x+2r])^2 = int_{-2r}^{2r} (2r - |t|) rho2(t) dt, by stationarity.
inline double second_moment_box_exact(double r, const PrimeTable& table,
                                      const ChaosParams& params) {
    if (!(r > 0 && r <= 0.25))
        throw std::invalid_argument("second_moment_box_exact: r in (0, 1/4] required");
    if (params.beta * params.beta >= 2.0)
        throw numeric_guard_error(
            "second_moment_box_exact: beta >= sqrt(2) hits the q=2 moment barrier "
            "(finite only for q < 4/beta^2)");
    const double w = 2.0 * r;
    const double scale = params.critical_scale();
    const double v = 2.0 * integrate_tanh_sinh(
                               [&](double t) { return (w - t) * two_point_density(t, table, params); },
                               0.0, w, 1e-9);
    return scale * scale * v;
}

// ---------------------------------------------------------------------------
// Deterministic Monte Carlo drivers
// ---------------------------------------------------------------------------

struct McConfig {
    std::size_t n_samples = 1000;
    std::uint64_t seed = 1;
    std::uint64_t stream_base = 0;
    unsigned workers = 1;
    std::size_t chunk = 256;
};

// Box masses over [x_lo, x_hi] (n_seg trapezoid segments) for each beta, one
// shared field realization per sample.  masses[b][s] is deterministic in
// (seed, stream_base + s) regardless of worker count.
inline std::vector<std::vector<double>>
mc_box_masses(const PrimeTable& table, std::size_t n_use, std::span<const double> betas,
              double x_lo, double x_hi, std::size_t n_seg, bool critical_factor,
              const McConfig& cfg) {
    const std::size_t K = n_seg + 1;
    const double h = (x_hi - x_lo) / (double)n_seg;
    std::vector<double> log_norm(betas.size()), scale(betas.size());
    for (std::size_t b = 0; b < betas.size(); ++b) {
        ChaosParams p{betas[b], n_use, NormalizationKind::exact_bessel, critical_factor};
        log_norm[b] = p.log_norm(table);
        scale[b] = p.critical_scale();
    }
    std::vector<std::vector<double>> masses(betas.size());
    for (auto& v : masses) v.resize(cfg.n_samples);
    parallel_chunks(cfg.n_samples, cfg.chunk, cfg.workers, [&](std::size_t, std::size_t s0,
                                                               std::size_t s1) {
        std::vector<double> theta(n_use), field(K);
        for (std::size_t s = s0; s < s1; ++s) {
            for (std::size_t j = 0; j < n_use; ++j)
                theta[j] = uniform_phase(cfg.seed, cfg.stream_base + s, j);
            std::fill(field.begin(), field.end(), 0.0);
            if (n_use > 0)
                detail::accumulate_phase_field(table, 1, n_use, theta, x_lo, h, K,
                                               field.data());
            for (std::size_t b = 0; b < betas.size(); ++b)
                masses[b][s] =
                    scale[b] * detail::box_mass(field, 0, n_seg, h, betas[b], log_norm[b]);
        }
    });
    return masses;
}

// Monte Carlo Laplace functional E exp(sum_i lambda_i X(x_i)).
inline MeanSE mc_laplace_functional(const PrimeTable& table, std::size_t n_use,
                                    std::span<const double> points,
                                    std::span<const double> lambdas, const McConfig& cfg) {
    // fold the point sum into two per-prime coefficients:
    // sum_i lambda_i cos(x_i w - th) = A cos th + B sin th
    std::vector<double> A(n_use, 0.0), B(n_use, 0.0);
    for (std::size_t j = 0; j < n_use; ++j) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double a = points[i] * table.log_p[j];
            A[j] += lambdas[i] * std::cos(a) * table.inv_sqrt_p[j];
            B[j] += lambdas[i] * std::sin(a) * table.inv_sqrt_p[j];
        }
    }
    std::vector<double> vals(cfg.n_samples);
    parallel_chunks(cfg.n_samples, cfg.chunk, cfg.workers,
                    [&](std::size_t, std::size_t s0, std::size_t s1) {
                        for (std::size_t s = s0; s < s1; ++s) {
                            double e = 0;
                            for (std::size_t j = 0; j < n_use; ++j) {
                                const double th =
                                    uniform_phase(cfg.seed, cfg.stream_base + s, j);
                                e += A[j] * std::cos(th) + B[j] * std::sin(th);
                            }
                            vals[s] = std::exp(e);
                        }
                    });
    return mean_se(vals);
}

enum class FieldKind { phase, gaussian };

// Empirical covariance of the field at point pairs, against psi_N(x-y).
struct CovEstimate {
    double cov = 0, se = 0;
};

inline std::vector<CovEstimate>
mc_covariance_pairs(const PrimeTable& table, std::size_t n_use,
                    std::span<const std::pair<double, double>> pairs, FieldKind kind,
                    const McConfig& cfg) {
    // distinct evaluation points
    std::vector<double> pts;
    std::vector<std::pair<std::size_t, std::size_t>> idx;
    for (const auto& pr : pairs) {
        auto find = [&](double x) {
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (pts[i] == x) return i;
            pts.push_back(x);
            return pts.size() - 1;
        };
        idx.emplace_back(find(pr.first), find(pr.second));
    }
    const std::size_t P = pts.size(), n_pairs = pairs.size();
    std::vector<double> ctab(n_use * P), stab(n_use * P);
    for (std::size_t j = 0; j < n_use; ++j)
        for (std::size_t i = 0; i < P; ++i) {
            const double a = pts[i] * table.log_p[j];
            ctab[j * P + i] = std::cos(a);
            stab[j * P + i] = std::sin(a);
        }
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    std::vector<std::vector<double>> prod(n_pairs);
    for (auto& v : prod) v.resize(cfg.n_samples);
    parallel_chunks(cfg.n_samples, cfg.chunk, cfg.workers, [&](std::size_t, std::size_t s0,
                                                               std::size_t s1) {
        std::vector<double> X(P);
        for (std::size_t s = s0; s < s1; ++s) {
            std::fill(X.begin(), X.end(), 0.0);
            for (std::size_t j = 0; j < n_use; ++j) {
                const double* cj = &ctab[j * P];
                const double* sj = &stab[j * P];
                if (kind == FieldKind::phase) {
                    const double th = uniform_phase(cfg.seed, cfg.stream_base + s, j);
                    const double amp = table.inv_sqrt_p[j];
                    const double ct = std::cos(th), st = std::sin(th);
                    for (std::size_t i = 0; i < P; ++i)
                        X[i] += amp * (cj[i] * ct + sj[i] * st);
                } else {
                    const auto z = normal_pair(cfg.seed, cfg.stream_base + s, j);
                    const double amp = table.inv_sqrt_p[j] * inv_sqrt2;
                    for (std::size_t i = 0; i < P; ++i)
                        X[i] += amp * (z[0] * cj[i] + z[1] * sj[i]);
                }
            }
            for (std::size_t q = 0; q < n_pairs; ++q)
                prod[q][s] = X[idx[q].first] * X[idx[q].second];
        }
    });
    // fields are centered, so Cov ~ mean of the product
    std::vector<CovEstimate> out(n_pairs);
    for (std::size_t q = 0; q < n_pairs; ++q) {
        const auto ms = mean_se(prod[q]);
        out[q] = {ms.mean, ms.se};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Moment studies and scaling fits
// ---------------------------------------------------------------------------

struct MomentEstimates {
    double q = 0;
    std::vector<double> r;
    std::vector<double> moment;  // MC mean of mu(B(1/2, r))^q
    std::vector<double> se;     // jackknife
    std::size_t n_samples = 0;
    bool heavy_tail_warning = false;  // q beta^2 / 4 >= 1
};

inline MomentEstimates mc_moment(const PrimeTable& table, const ChaosParams& params, double q,
                                 std::span<const double> r_list, const McConfig& cfg) {
    if (r_list.empty()) throw std::invalid_argument("mc_moment: empty r list");
    double r_max = 0, r_min = 1e300;
    for (double r : r_list) {
        if (!(r > 0 && r <= 0.25)) throw std::invalid_argument("mc_moment: r in (0, 1/4]");
        r_max = std::max(r_max, r);
        r_min = std::min(r_min, r);
    }
    // one grid over the largest box; dyadic r's land on grid nodes
    const double h = r_min / 16.0;
    const std::size_t n_seg = (std::size_t)std::llround(2.0 * r_max / h);
    const std::size_t K = n_seg + 1;
    const double x_lo = 0.5 - r_max;
    const double log_norm = params.log_norm(table);
    const double scale = params.critical_scale();
    std::vector<std::size_t> off(r_list.size()), seg(r_list.size());
    for (std::size_t i = 0; i < r_list.size(); ++i) {
        off[i] = (std::size_t)std::llround((r_max - r_list[i]) / h);
        seg[i] = (std::size_t)std::llround(2.0 * r_list[i] / h);
        if (std::abs(off[i] * h - (r_max - r_list[i])) > 1e-12 ||
            std::abs(seg[i] * h - 2.0 * r_list[i]) > 1e-12)
            throw std::invalid_argument("mc_moment: r values must be commensurate dyadics");
    }
    std::vector<std::vector<double>> powers(r_list.size());
    for (auto& v : powers) v.resize(cfg.n_samples);
    parallel_chunks(cfg.n_samples, cfg.chunk, cfg.workers, [&](std::size_t, std::size_t s0,
                                                               std::size_t s1) {
        std::vector<double> theta(params.n_primes), field(K);
        for (std::size_t s = s0; s < s1; ++s) {
            for (std::size_t j = 0; j < params.n_primes; ++j)
                theta[j] = uniform_phase(cfg.seed, cfg.stream_base + s, j);
            std::fill(field.begin(), field.end(), 0.0);
            detail::accumulate_phase_field(table, 1, params.n_primes, theta, x_lo, h, K,
                                           field.data());
            for (std::size_t i = 0; i < r_list.size(); ++i) {
                const double m =
                    scale * detail::box_mass(field, off[i], seg[i], h, params.beta, log_norm);
                powers[i][s] = q == 0.0 ? 1.0 : std::pow(m, q);
            }
        }
    });
    MomentEstimates est;
    est.q = q;
    est.n_samples = cfg.n_samples;
    est.heavy_tail_warning = q * params.beta * params.beta / 4.0 >= 1.0;
    for (std::size_t i = 0; i < r_list.size(); ++i) {
        const auto ms = jackknife_mean_se(powers[i]);
        est.r.push_back(r_list[i]);
        est.moment.push_back(ms.mean);
        est.se.push_back(ms.se);
    }
    return est;
}

struct ScalingFit {
    double q = 0;
    std::vector<double> r, moment, se;
    double slope = 0, slope_se = 0;
    double theory_paper = 0;        // (1 + beta^2/2) q - (beta^2/2) q^2
    double theory_half_kernel = 0;  // (1 + beta^2/4) q - (beta^2/4) q^2
};

inline ScalingFit scaling_exponent_fit(const MomentEstimates& m, double beta) {
    if (m.r.size() < 2) throw std::invalid_argument("scaling_exponent_fit: need >= 2 radii");
    std::vector<double> x, y, w;
    for (std::size_t i = 0; i < m.r.size(); ++i) {
        x.push_back(std::log(m.r[i]));
        y.push_back(std::log(m.moment[i]));
        const double rel = m.se[i] > 0 ? m.se[i] / m.moment[i] : 1e-6;
        w.push_back(1.0 / (rel * rel));
    }
    const auto f = wls_line(x, y, w);
    ScalingFit fit;
    fit.q = m.q;
    fit.r = m.r;
    fit.moment = m.moment;
    fit.se = m.se;
    fit.slope = f.slope;
    fit.slope_se = f.slope_se;
    const double b2 = beta * beta;
    fit.theory_paper = (1.0 + b2 / 2.0) * m.q - (b2 / 2.0) * m.q * m.q;
    fit.theory_half_kernel = (1.0 + b2 / 4.0) * m.q - (b2 / 4.0) * m.q * m.q;
    return fit;
}

// ---------------------------------------------------------------------------
// Martingale check and critical-mass study
// ---------------------------------------------------------------------------

struct MartingaleOuter {
    double base_mass = 0, inner_mean = 0, inner_se = 0, z = 0;
};

struct MartingaleReport {
    std::vector<MartingaleOuter> outer;
    double aggregate_z = 0;
    bool skipped = false;  // degenerate box
};

// Holds phases 1..n_base fixed per outer draw and averages the extended-mass
// over fresh draws of phases n_base+1..n_extended; the conditional mean of
// each added factor e^{beta a cos}/I0(beta a) is exactly one.
inline MartingaleReport martingale_check(const PrimeTable& table, const ChaosParams& params,
                                         std::size_t n_base, std::size_t n_extended,
                                         double box_lo, double box_hi, std::size_t n_outer,
                                         std::size_t n_inner, std::size_t n_seg,
                                         const McConfig& cfg) {
    if (n_base > n_extended)
        throw std::invalid_argument("martingale_check: n_base <= n_extended required");
    MartingaleReport rep;
    if (!(box_hi > box_lo)) {
        rep.skipped = true;
        return rep;
    }
    const std::size_t K = n_seg + 1;
    const double h = (box_hi - box_lo) / (double)n_seg;
    ChaosParams base_p = params;
    base_p.n_primes = n_base;
    ChaosParams ext_p = params;
    ext_p.n_primes = n_extended;
    const double logz_base = base_p.log_norm(table);
    const double logz_ext = ext_p.log_norm(table);
    rep.outer.resize(n_outer);
    parallel_chunks(n_outer, 1, cfg.workers, [&](std::size_t, std::size_t o0, std::size_t o1) {
        std::vector<double> theta(n_extended), base_field(K), delta(K);
        std::vector<double> inner_mass(n_inner);
        for (std::size_t o = o0; o < o1; ++o) {
            const std::uint64_t outer_stream = mix_stream(cfg.stream_base + o, 0xBA5Eull);
            for (std::size_t j = 0; j < n_base; ++j)
                theta[j] = uniform_phase(cfg.seed, outer_stream, j);
            std::fill(base_field.begin(), base_field.end(), 0.0);
            if (n_base > 0)
                detail::accumulate_phase_field(table, 1, n_base, theta, box_lo, h, K,
                                               base_field.data());
            const double m0 =
                detail::box_mass(base_field, 0, n_seg, h, params.beta, logz_base);
            for (std::size_t i = 0; i < n_inner; ++i) {
                if (n_extended > n_base) {
                    const std::uint64_t s = mix_stream(outer_stream, 0x1BBE5ull + i);
                    for (std::size_t j = n_base; j < n_extended; ++j)
                        theta[j] = uniform_phase(cfg.seed, s, j);
                    std::fill(delta.begin(), delta.end(), 0.0);
                    detail::accumulate_phase_field(table, n_base + 1, n_extended, theta,
                                                   box_lo, h, K, delta.data());
                    for (std::size_t k = 0; k < K; ++k) delta[k] += base_field[k];
                    inner_mass[i] =
                        detail::box_mass(delta, 0, n_seg, h, params.beta, logz_ext);
                } else {
                    inner_mass[i] = m0;
                }
            }
            const auto ms = mean_se(inner_mass);
            auto& out = rep.outer[o];
            out.base_mass = m0;
            out.inner_mean = ms.mean;
            out.inner_se = ms.se;
            out.z = ms.se > 0 ? (ms.mean - m0) / ms.se : 0.0;
        }
    });
    double zsum = 0;
    for (const auto& o : rep.outer) zsum += o.z;
    rep.aggregate_z = n_outer > 0 ? zsum / std::sqrt((double)n_outer) : 0.0;
    return rep;
}

struct CriticalMassSummary {
    std::size_t n_primes = 0;
    double median = 0, q1 = 0, q3 = 0, mean = 0;
    double half_moment = 0, half_moment_se = 0;  // E mass^{1/2}
};

// Per N: distribution summary of sqrt(log log N) * mu_{2,N}(0,1).
inline std::vector<CriticalMassSummary>
critical_mass_study(const PrimeTable& table, std::span<const std::size_t> n_list,
                    std::size_t n_seg, const McConfig& cfg) {
    std::vector<CriticalMassSummary> out;
    const double beta_c = ChaosParams::beta_critical;
    for (std::size_t N : n_list) {
        if (N > table.count())
            throw std::invalid_argument("critical_mass_study: N exceeds table");
        const double betas[1] = {beta_c};
        auto masses = mc_box_masses(table, N, betas, 0.0, 1.0, n_seg, true, cfg);
        CriticalMassSummary s;
        s.n_primes = N;
        const auto qs = quartiles(masses[0]);
        s.q1 = qs.q1;
        s.median = qs.median;
        s.q3 = qs.q3;
        s.mean = mean_se(masses[0]).mean;
        std::vector<double> roots(masses[0].size());
        for (std::size_t i = 0; i < roots.size(); ++i) roots[i] = std::sqrt(masses[0][i]);
        const auto hm = jackknife_mean_se(roots);
        s.half_moment = hm.mean;
        s.half_moment_se = hm.se;
        out.push_back(s);
    }
    return out;
}

} // namespace zeta_chaos
