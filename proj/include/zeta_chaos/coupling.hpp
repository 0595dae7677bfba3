#pragma once

// Explicit coupling between normalized block sums and planar Gaussians.
//
// A block over prime indices [first,last] defines the R^2-valued sum
//   W = l^{-1} sum_j a_j (cos theta_j, sin theta_j),  a_j = sqrt(p_last/p_j),
//   l^2 = sum_j a_j^2 / 2,
// whose characteristic function is the radial product prod_j J0(a_j rho / l).
// The coupling pipeline smooths W with an independent Gaussian at scale
// sigma = n^{-1/2} (the variance scale of the underlying approximation
// theorem, variance-normalized so the smoothed marginal stays unit), inverts
// the characteristic function by a Hankel transform, grids both laws on a
// common square window, and transports via the minimal-common-part coupling
//   beta = mu - (mu-nu)_+ on the diagonal,
//   (2/||mu-nu||_TV) (mu-nu)_+ x (nu-mu)_+ off it.
// Diagonal transport is the identity on the continuous draw, so the realized
// cost matches the analytic product-part cost.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "zeta_chaos/field.hpp"
#include "zeta_chaos/primes.hpp"
#include "zeta_chaos/rng.hpp"
#include "zeta_chaos/special.hpp"
#include "zeta_chaos/stats.hpp"

namespace zeta_chaos {

struct tail_not_decayed_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RadialKind { block, gaussian, smoothed_block };

// Rotation-invariant planar law described by its radial characteristic
// profile phi(rho); the 2-D characteristic function is phi(|xi|).
struct RadialLaw {
    std::vector<double> rho;  // uniform grid starting at 0
    std::vector<double> phi;
    RadialKind kind = RadialKind::block;
    double step() const { return rho.size() > 1 ? rho[1] - rho[0] : 0.0; }
};

inline std::vector<double> default_rho_grid(std::size_t n = 4096, double rho_max = 64.0) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = rho_max * (double)i / (double)(n - 1);
    return g;
}

inline std::vector<double> block_amplitudes(const PrimeTable& table, const Block& blk) {
    const double p_last = (double)table.p(blk.last);
    std::vector<double> a(blk.size());
    double l2 = 0;
    for (std::size_t i = 0; i < blk.size(); ++i) {
        a[i] = std::sqrt(p_last / (double)table.p(blk.first + i));
        l2 += 0.5 * a[i] * a[i];
    }
    const double inv_l = 1.0 / std::sqrt(l2);
    for (auto& v : a) v *= inv_l;
    return a;
}

// phi(rho) = prod_j J0(a_j rho), optionally convolved with N(0, sigma^2 I)
// and rescaled to unit per-coordinate variance.
inline RadialLaw block_char_profile(const PrimeTable& table, const Block& blk,
                                    const std::vector<double>& rho_grid,
                                    double smoothing_sigma = 0.0) {
    const auto a = block_amplitudes(table, blk);
    RadialLaw law;
    law.rho = rho_grid;
    law.phi.resize(rho_grid.size());
    const double s2 = smoothing_sigma * smoothing_sigma;
    const double shrink = 1.0 / std::sqrt(1.0 + s2);
    for (std::size_t i = 0; i < rho_grid.size(); ++i) {
        const double rho = rho_grid[i] * (smoothing_sigma > 0 ? shrink : 1.0);
        double p = 1.0;
        for (double aj : a) {
            p *= bessel_j0(aj * rho);
            if (p == 0.0) break;
        }
        if (smoothing_sigma > 0)
            p *= std::exp(-0.5 * s2 * shrink * shrink * rho_grid[i] * rho_grid[i]);
        law.phi[i] = p;
    }
    law.kind = smoothing_sigma > 0 ? RadialKind::smoothed_block : RadialKind::block;
    return law;
}

inline RadialLaw gaussian_radial_law(const std::vector<double>& rho_grid) {
    RadialLaw law;
    law.rho = rho_grid;
    law.phi.resize(rho_grid.size());
    for (std::size_t i = 0; i < rho_grid.size(); ++i)
        law.phi[i] = std::exp(-0.5 * rho_grid[i] * rho_grid[i]);
    law.kind = RadialKind::gaussian;
    return law;
}

struct RadialDensity {
    std::vector<double> r;  // uniform grid from 0
    std::vector<double> f;
    double mass_defect = 0;  // |1 - integral|

    double at(double radius) const {
        if (radius >= r.back()) return 0.0;
        const double step = r[1] - r[0];
        const std::size_t i = (std::size_t)(radius / step);
        const double frac = radius / step - (double)i;
        return i + 1 < f.size() ? f[i] * (1 - frac) + f[i + 1] * frac : f[i];
    }
};

// Hankel inversion f(r) = (2 pi)^{-1} int_0^inf phi(rho) J0(r rho) rho d rho,
// truncated at the grid end; requires the tail to have decayed.
inline RadialDensity density_from_radial(const RadialLaw& law,
                                         const std::vector<double>& radius_grid) {
    if (law.rho.size() < 8) throw std::invalid_argument("density_from_radial: grid too small");
    if (std::abs(law.phi.back()) >= 1e-8)
        throw tail_not_decayed_error(
            "density_from_radial: |phi| has not decayed below 1e-8 at the grid end "
            "(singular or near-singular law)");
    const double h = law.step();
    const std::size_t n = law.rho.size();
    RadialDensity d;
    d.r = radius_grid;
    d.f.resize(radius_grid.size());
    for (std::size_t k = 0; k < radius_grid.size(); ++k) {
        const double r = radius_grid[k];
        // composite Simpson over the rho grid
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            s += w * law.phi[i] * bessel_j0(r * law.rho[i]) * law.rho[i];
        }
        d.f[k] = s * h / 3.0 / (2.0 * std::numbers::pi);
    }
    // mass = 2 pi int f(r) r dr over the radius grid
    const double hr = radius_grid[1] - radius_grid[0];
    double m = 0;
    for (std::size_t k = 0; k < radius_grid.size(); ++k) {
        const double w = (k == 0 || k + 1 == radius_grid.size()) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        m += w * d.f[k] * radius_grid[k];
    }
    d.mass_defect = std::abs(1.0 - 2.0 * std::numbers::pi * m * hr / 3.0);
    return d;
}

// ---------------------------------------------------------------------------
// Common square grid and the minimal-common-part coupling
// ---------------------------------------------------------------------------

struct PlanarGrid {
    int n = 256;             // n x n cells
    double half_width = 5.0;  // window [-hw, hw]^2
    double h() const { return 2.0 * half_width / (double)n; }
    double center_x(std::size_t cell) const {
        return -half_width + ((double)(cell % (std::size_t)n) + 0.5) * h();
    }
    double center_y(std::size_t cell) const {
        return -half_width + ((double)(cell / (std::size_t)n) + 0.5) * h();
    }
    // cell index of a point, or npos if outside the window
    static constexpr std::size_t npos = (std::size_t)-1;
    std::size_t cell_of(double x, double y) const {
        if (std::abs(x) >= half_width || std::abs(y) >= half_width) return npos;
        const std::size_t i = (std::size_t)((x + half_width) / h());
        const std::size_t j = (std::size_t)((y + half_width) / h());
        return std::min(j, (std::size_t)n - 1) * (std::size_t)n +
               std::min(i, (std::size_t)n - 1);
    }
    std::size_t cells() const { return (std::size_t)n * (std::size_t)n; }
};

struct GriddedLaw {
    PlanarGrid grid;
    std::vector<double> mass;  // normalized to 1
    double window_defect = 0;  // mass lost to the window / discretization
};

inline GriddedLaw grid_radial_density(const RadialDensity& density, const PlanarGrid& grid) {
    GriddedLaw g;
    g.grid = grid;
    g.mass.resize(grid.cells());
    const double cell_area = grid.h() * grid.h();
    double total = 0;
    for (std::size_t c = 0; c < grid.cells(); ++c) {
        const double x = grid.center_x(c), y = grid.center_y(c);
        g.mass[c] = density.at(std::hypot(x, y)) * cell_area;
        total += g.mass[c];
    }
    g.window_defect = std::abs(1.0 - total);
    for (auto& m : g.mass) m /= total;
    return g;
}

inline GriddedLaw grid_standard_gaussian(const PlanarGrid& grid) {
    GriddedLaw g;
    g.grid = grid;
    g.mass.resize(grid.cells());
    const int n = grid.n;
    std::vector<double> edge_mass(n);
    for (int i = 0; i < n; ++i) {
        const double lo = -grid.half_width + i * grid.h();
        edge_mass[i] = norm_cdf(lo + grid.h()) - norm_cdf(lo);
    }
    double total = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double m = edge_mass[i] * edge_mass[j];
            g.mass[(std::size_t)j * n + i] = m;
            total += m;
        }
    g.window_defect = std::abs(1.0 - total);
    for (auto& m : g.mass) m /= total;
    return g;
}

struct DiscreteCoupling {
    PlanarGrid grid;
    std::vector<double> mu, nu;        // the normalized marginals
    std::vector<double> diag;          // beta = min(mu, nu)
    std::vector<double> mu_exc, nu_exc;  // (mu-nu)_+ and (nu-mu)_+
    double tv = 0;                     // ||mu - nu||_TV = sum |mu - nu|
    bool diagonal_only = false;
    double cost = 0;                   // exact expected transport distance
    std::vector<double> nu_exc_cdf;    // for product-part sampling
    std::vector<std::uint32_t> nu_exc_cells;
};

inline DiscreteCoupling lemma11_coupling(const GriddedLaw& mu, const GriddedLaw& nu) {
    if (mu.grid.n != nu.grid.n || mu.grid.half_width != nu.grid.half_width)
        throw std::invalid_argument("lemma11_coupling: grids differ");
    double smu = 0, snu = 0;
    for (double m : mu.mass) {
        if (m < 0) throw std::invalid_argument("lemma11_coupling: negative mass");
        smu += m;
    }
    for (double m : nu.mass) {
        if (m < 0) throw std::invalid_argument("lemma11_coupling: negative mass");
        snu += m;
    }
    if (std::abs(smu - 1.0) > 1e-9 || std::abs(snu - 1.0) > 1e-9)
        throw std::invalid_argument("lemma11_coupling: marginals must sum to 1");
    DiscreteCoupling cp;
    cp.grid = mu.grid;
    cp.mu = mu.mass;
    cp.nu = nu.mass;
    const std::size_t n_cells = cp.grid.cells();
    cp.diag.resize(n_cells);
    cp.mu_exc.resize(n_cells);
    cp.nu_exc.resize(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) {
        const double d = cp.mu[c] - cp.nu[c];
        cp.diag[c] = std::min(cp.mu[c], cp.nu[c]);
        cp.mu_exc[c] = d > 0 ? d : 0.0;
        cp.nu_exc[c] = d < 0 ? -d : 0.0;
        cp.tv += std::abs(d);
    }
    if (cp.tv < 1e-12) {
        cp.diagonal_only = true;  // coupling degenerates to the identity
        cp.cost = 0.0;
        return cp;
    }
    // exact product-part cost over the pruned supports
    std::vector<std::uint32_t> sa, sb;
    const double eps = 1e-16 * cp.tv;
    for (std::size_t c = 0; c < n_cells; ++c) {
        if (cp.mu_exc[c] > eps) sa.push_back((std::uint32_t)c);
        if (cp.nu_exc[c] > eps) sb.push_back((std::uint32_t)c);
    }
    double acc = 0;
    for (std::uint32_t ca : sa) {
        const double xa = cp.grid.center_x(ca), ya = cp.grid.center_y(ca);
        const double wa = cp.mu_exc[ca];
        double row = 0;
        for (std::uint32_t cb : sb)
            row += cp.nu_exc[cb] * std::hypot(xa - cp.grid.center_x(cb),
                                              ya - cp.grid.center_y(cb));
        acc += wa * row;
    }
    cp.cost = 2.0 / cp.tv * acc;
    // cumulative weights of the nu excess for sampling
    cp.nu_exc_cells = sb;
    cp.nu_exc_cdf.resize(sb.size());
    double run = 0;
    for (std::size_t i = 0; i < sb.size(); ++i) {
        run += cp.nu_exc[sb[i]];
        cp.nu_exc_cdf[i] = run;
    }
    return cp;
}

// One transported point for a realized draw x of the mu side.  The diagonal
// part keeps the draw itself; the product part resamples from the nu excess
// with a uniform jitter inside the target cell.
inline std::pair<double, double> coupling_transport(const DiscreteCoupling& cp, double x,
                                                    double y, std::uint64_t seed,
                                                    std::uint64_t stream,
                                                    std::uint64_t index) {
    if (cp.diagonal_only) return {x, y};
    const auto w = philox4(seed, stream, index);
    const std::size_t c = cp.grid.cell_of(x, y);
    bool diagonal = false;
    if (c != PlanarGrid::npos && cp.mu[c] > 0)
        diagonal = u01(w[0], w[1]) < cp.diag[c] / cp.mu[c];
    if (diagonal) return {x, y};
    const double total = cp.nu_exc_cdf.back();
    const double target = u01(w[2], w[3]) * total;
    const std::size_t k =
        std::lower_bound(cp.nu_exc_cdf.begin(), cp.nu_exc_cdf.end(), target) -
        cp.nu_exc_cdf.begin();
    const std::size_t cell = cp.nu_exc_cells[std::min(k, cp.nu_exc_cells.size() - 1)];
    const auto w2 = philox4(seed, stream, index + 0x517EC0DEull);
    const double h = cp.grid.h();
    return {cp.grid.center_x(cell) + (u01(w2[0], w2[1]) - 0.5) * h,
            cp.grid.center_y(cell) + (u01(w2[2], w2[3]) - 0.5) * h};
}

// Lemma bound 4R |mu-nu|(B(x0,R)) + 32 int_{R/2}^inf |mu-nu|(B(x0,r)^c) dr,
// evaluated for the discrete measures.
inline double w1_upper_bound(const GriddedLaw& mu, const GriddedLaw& nu, double R,
                             double x0 = 0.0, double y0 = 0.0) {
    double ball = 0, tail = 0;
    for (std::size_t c = 0; c < mu.grid.cells(); ++c) {
        const double m = std::abs(mu.mass[c] - nu.mass[c]);
        if (m == 0) continue;
        const double d = std::hypot(mu.grid.center_x(c) - x0, mu.grid.center_y(c) - y0);
        if (d <= R) ball += m;
        if (d > 0.5 * R) tail += m * (d - 0.5 * R);
    }
    return 4.0 * R * ball + 32.0 * tail;
}

struct W1BoundSweep {
    double min_bound = 0, r_at_min = 0;
};

inline W1BoundSweep w1_bound_sweep(const GriddedLaw& mu, const GriddedLaw& nu,
                                   std::size_t n_r = 64) {
    W1BoundSweep s;
    s.min_bound = 1e300;
    const double r_lo = mu.grid.h(), r_hi = 4.0 * mu.grid.half_width;
    for (std::size_t i = 0; i < n_r; ++i) {
        const double R = r_lo * std::pow(r_hi / r_lo, (double)i / (double)(n_r - 1));
        const double b = w1_upper_bound(mu, nu, R);
        if (b < s.min_bound) {
            s.min_bound = b;
            s.r_at_min = R;
        }
    }
    return s;
}

struct FourierL1Diag {
    double l1 = 0;        // 2 pi int |phi_a - phi_b| rho d rho
    double tail = 0;      // int_{R/2}^inf (mu+nu)(B(0,r)^c) dr at the given R
    double bound = 0;     // R^3 l1 + 32 tail (planar case shape, constants set to 1)
};

inline FourierL1Diag fourier_l1_diag(const RadialLaw& a, const RadialLaw& b, double R,
                                     const GriddedLaw* mu = nullptr,
                                     const GriddedLaw* nu = nullptr) {
    if (a.rho.size() != b.rho.size())
        throw std::invalid_argument("fourier_l1_diag: profiles need a common grid");
    FourierL1Diag d;
    const double h = a.step();
    double s = 0;
    for (std::size_t i = 0; i < a.rho.size(); ++i) {
        const double w = (i == 0 || i + 1 == a.rho.size()) ? 0.5 : 1.0;
        s += w * std::abs(a.phi[i] - b.phi[i]) * a.rho[i];
    }
    d.l1 = 2.0 * std::numbers::pi * s * h;
    if (mu && nu) {
        for (std::size_t c = 0; c < mu->grid.cells(); ++c) {
            const double m = mu->mass[c] + nu->mass[c];
            const double dist = std::hypot(mu->grid.center_x(c), mu->grid.center_y(c));
            if (dist > 0.5 * R) d.tail += m * (dist - 0.5 * R);
        }
    }
    d.bound = R * R * R * d.l1 + 32.0 * d.tail;
    return d;
}

// ---------------------------------------------------------------------------
// End-to-end block coupling
// ---------------------------------------------------------------------------

struct BlockCouplingConfig {
    int grid_n = 256;
    double half_width = 5.0;
    std::size_t rho_points = 4097;      // odd, for Simpson
    double rho_max = 64.0;
    double smoothing = -1.0;            // < 0: use n^{-1/2}
    std::size_t radius_points = 1025;
};

class BlockCoupling {
  public:
    BlockCoupling(const PrimeTable& table, const Block& blk, BlockCouplingConfig cfg = {})
        : table_(table), blk_(blk), cfg_(cfg) {
        if (blk.size() < 4)
            throw tail_not_decayed_error("BlockCoupling: block size < 4 has a singular law");
        sigma_ = cfg.smoothing < 0 ? 1.0 / std::sqrt((double)blk.size()) : cfg.smoothing;
        b_ = block_b(table, blk);
        const auto rho = default_rho_grid(cfg.rho_points, cfg.rho_max);
        raw_law_ = block_char_profile(table, blk, rho, 0.0);
        smoothed_law_ = block_char_profile(table, blk, rho, sigma_);
        gauss_law_ = gaussian_radial_law(rho);
        std::vector<double> radii(cfg.radius_points);
        const double r_max = cfg.half_width * std::numbers::sqrt2 + 0.1;
        for (std::size_t i = 0; i < radii.size(); ++i)
            radii[i] = r_max * (double)i / (double)(radii.size() - 1);
        density_ = density_from_radial(smoothed_law_, radii);
        const PlanarGrid grid{cfg.grid_n, cfg.half_width};
        mu_ = grid_radial_density(density_, grid);
        nu_ = grid_standard_gaussian(grid);
        coupling_ = lemma11_coupling(mu_, nu_);
    }

    struct Draw {
        double C = 0, S = 0, b = 0;    // block sums and their scale
        double w1 = 0, w2 = 0;         // normalized block sum W = (C,S)/b
        double wt1 = 0, wt2 = 0;       // smoothed, variance-normalized draw
        double v1 = 0, v2 = 0;         // coupled Gaussian pair
    };

    Draw draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) const {
        Draw d;
        d.b = b_;
        const std::uint64_t phase_stream = mix_stream(stream, index);
        for (std::size_t i = 0; i < blk_.size(); ++i) {
            const double th = uniform_phase(seed, phase_stream, i);
            const double amp = table_.inv_sqrt_p[blk_.first - 1 + i];
            d.C += amp * std::cos(th);
            d.S += amp * std::sin(th);
        }
        d.w1 = d.C / b_;
        d.w2 = d.S / b_;
        const auto g = normal_pair(seed, phase_stream, blk_.size() + 1);
        const double shrink = 1.0 / std::sqrt(1.0 + sigma_ * sigma_);
        d.wt1 = (d.w1 + sigma_ * g[0]) * shrink;
        d.wt2 = (d.w2 + sigma_ * g[1]) * shrink;
        const auto v = coupling_transport(coupling_, d.wt1, d.wt2, seed, phase_stream,
                                          blk_.size() + 3);
        d.v1 = v.first;
        d.v2 = v.second;
        return d;
    }

    const DiscreteCoupling& coupling() const { return coupling_; }
    const RadialLaw& raw_law() const { return raw_law_; }
    const RadialLaw& smoothed_law() const { return smoothed_law_; }
    const RadialLaw& gaussian_law() const { return gauss_law_; }
    const GriddedLaw& mu() const { return mu_; }
    const GriddedLaw& nu() const { return nu_; }
    double smoothing_sigma() const { return sigma_; }
    double mass_defect() const { return density_.mass_defect; }

  private:
    const PrimeTable& table_;
    Block blk_;
    BlockCouplingConfig cfg_;
    double sigma_ = 0, b_ = 0;
    RadialLaw raw_law_, smoothed_law_, gauss_law_;
    RadialDensity density_;
    GriddedLaw mu_, nu_;
    DiscreteCoupling coupling_;
};

// One coupled draw; tiny blocks fall back to an independent Gaussian pair.
inline BlockSample couple_block(const PrimeTable& table, const Block& blk,
                                int grid_resolution, std::uint64_t seed,
                                std::uint64_t stream = 0, std::uint64_t index = 0) {
    BlockSample bs;
    bs.m = blk.first;
    try {
        BlockCouplingConfig cfg;
        cfg.grid_n = grid_resolution;
        const BlockCoupling bc(table, blk, cfg);
        const auto d = bc.draw(seed, stream, index);
        bs.C = d.C;
        bs.S = d.S;
        bs.b = d.b;
        bs.v1 = d.v1;
        bs.v2 = d.v2;
        bs.coupled = true;
    } catch (const tail_not_decayed_error&) {
        bs.b = block_b(table, blk);
        const std::uint64_t phase_stream = mix_stream(stream, index);
        for (std::size_t i = 0; i < blk.size(); ++i) {
            const double th = uniform_phase(seed, phase_stream, i);
            const double amp = table.inv_sqrt_p[blk.first - 1 + i];
            bs.C += amp * std::cos(th);
            bs.S += amp * std::sin(th);
        }
        const auto g = normal_pair(seed, phase_stream, blk.size() + 1);
        bs.v1 = g[0];
        bs.v2 = g[1];
        bs.coupled = false;
    }
    return bs;
}

// ---------------------------------------------------------------------------
// Exact small-sample W1 by minimum-cost assignment (Hungarian, O(n^3))
// ---------------------------------------------------------------------------

inline double hungarian_min_cost(const std::vector<double>& cost, std::size_t n) {
    constexpr double inf = 1e300;
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0;
    for (std::size_t j = 1; j <= n; ++j) total += cost[(p[j] - 1) * n + (j - 1)];
    return total;
}

// Mean transport distance of the optimal pairing between two equal-size
// planar point clouds.
inline double empirical_w1(std::span<const std::pair<double, double>> a,
                           std::span<const std::pair<double, double>> b) {
    const std::size_t n = a.size();
    if (n == 0 || n != b.size()) throw std::invalid_argument("empirical_w1: size mismatch");
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost[i * n + j] = std::hypot(a[i].first - b[j].first, a[i].second - b[j].second);
    return hungarian_min_cost(cost, n) / (double)n;
}

// ---------------------------------------------------------------------------
// Per-block audit
// ---------------------------------------------------------------------------

struct CouplingAudit {
    std::size_t n = 0;               // block size
    double mean_abs_V = 0, se_V = 0;  // V = U - W per draw
    double lemma11_cost = 0;
    double w1_bound = 0;             // minimized over R
    double fourier_l1 = 0;           // raw block profile vs Gaussian
    double emp_w1 = 0, emp_w1_se = 0;
    double ks_v1 = 0;
    double marginal_defect = 0;      // Hankel mass defect of the gridded law
    int grid_resolution = 0;
    std::size_t sample_count = 0;
};

struct AuditConfig {
    std::size_t n_v_samples = 10000;
    std::size_t n_match = 512;
    std::size_t match_reps = 4;
    int grid_n = 256;
    std::uint64_t seed = 1;
    std::uint64_t stream = 77;
};

// A standard audit block of size n: prime indices [2n, 3n-1] (prime ratio
// safely below 2 there).
inline Block audit_block(std::size_t n) { return Block{2 * n, 3 * n - 1}; }

inline CouplingAudit run_block_audit(const PrimeTable& table, const Block& blk,
                                     const AuditConfig& cfg) {
    BlockCouplingConfig bcfg;
    bcfg.grid_n = cfg.grid_n;
    const BlockCoupling bc(table, blk, bcfg);
    CouplingAudit audit;
    audit.n = blk.size();
    audit.grid_resolution = cfg.grid_n;
    audit.sample_count = cfg.n_v_samples;
    audit.lemma11_cost = bc.coupling().cost;
    audit.w1_bound = w1_bound_sweep(bc.mu(), bc.nu()).min_bound;
    audit.fourier_l1 = fourier_l1_diag(bc.raw_law(), bc.gaussian_law(), 1.0).l1;
    audit.marginal_defect = bc.mass_defect();

    std::vector<double> absV(cfg.n_v_samples), v1s(cfg.n_v_samples);
    for (std::size_t s = 0; s < cfg.n_v_samples; ++s) {
        const auto d = bc.draw(cfg.seed, cfg.stream, s);
        absV[s] = std::hypot(d.v1 - d.w1, d.v2 - d.w2);
        v1s[s] = d.v1;
    }
    const auto ms = mean_se(absV);
    audit.mean_abs_V = ms.mean;
    audit.se_V = ms.se;
    audit.ks_v1 = ks_statistic(std::move(v1s), [](double x) { return norm_cdf(x); });

    std::vector<double> rep_costs(cfg.match_reps);
    for (std::size_t rep = 0; rep < cfg.match_reps; ++rep) {
        std::vector<std::pair<double, double>> xs(cfg.n_match), ys(cfg.n_match);
        for (std::size_t i = 0; i < cfg.n_match; ++i) {
            const auto d = bc.draw(cfg.seed, mix_stream(cfg.stream, 0xA11CEull + rep),
                                   1000000 + i);
            xs[i] = {d.wt1, d.wt2};
            ys[i] = {d.v1, d.v2};
        }
        rep_costs[rep] = empirical_w1(xs, ys);
    }
    const auto wm = mean_se(rep_costs);
    audit.emp_w1 = wm.mean;
    audit.emp_w1_se = wm.se;
    return audit;
}

} // namespace zeta_chaos
