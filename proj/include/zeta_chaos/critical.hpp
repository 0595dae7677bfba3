#pragma once

// The four-stage covariance chain that links the Gaussian field to the
// white-noise reference field, and the covariance-comparison diagnostics
// used for the critical normalization.
//
//   stage 1: primes replaced by Li^{-1}(j)      (finite sum)
//   stage 2: per-index Wiener integrals          (closed form per index)
//   stage 3: 1/sqrt(log t) weight                (cosine-integral difference)
//   stage 4: spectral weight sqrt(c_hat(s)/pi)   (quadrature)
//
// The reference field on [0,1] has covariance
//   1/2 (1 + t - e^t |x-y|)   for |x-y| <= e^{-t},
//   -1/2 log |x-y|            for e^{-t} <= |x-y| <= 1,
// and is sampled exactly by dense symmetric factorization.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "zeta_chaos/pairwise.hpp"
#include "zeta_chaos/primes.hpp"
#include "zeta_chaos/quadrature.hpp"
#include "zeta_chaos/rng.hpp"
#include "zeta_chaos/special.hpp"
#include "zeta_chaos/field.hpp"

namespace zeta_chaos {

enum class ChainStage { GN1, GN2, GN3, GN4 };

// Cached Li^{-1}(1..N+1) plus the log values used by every stage.
class ChainTables {
  public:
    explicit ChainTables(std::size_t n_max) : li_inv_(n_max + 1) {
        xi_.resize(n_max + 2);
        s_.resize(n_max + 2);
        for (std::size_t j = 1; j <= n_max + 1; ++j) {
            xi_[j] = li_inv_[j];
            s_[j] = std::log(xi_[j]);
        }
    }
    double xi(std::size_t j) const { return xi_[j]; }    // Li^{-1}(j)
    double s(std::size_t j) const { return s_[j]; }      // log Li^{-1}(j)
    std::size_t max_n() const { return xi_.size() - 2; }

  private:
    LiInverseTable li_inv_;
    std::vector<double> xi_, s_;
};

inline double chain_covariance(ChainStage stage, std::size_t N, double x, double y,
                               const ChainTables& tab) {
    if (N > tab.max_n()) throw std::invalid_argument("chain_covariance: N exceeds tables");
    if (!(x >= 0 && x <= 1 && y >= 0 && y <= 1))
        throw std::invalid_argument("chain_covariance: x, y in [0,1] required");
    const double u = std::abs(x - y);
    switch (stage) {
        case ChainStage::GN1:
            return 0.5 * pairwise_sum(std::size_t{1}, N + 1, [&](std::size_t j) {
                       return std::cos(u * tab.s(j)) / tab.xi(j);
                   });
        case ChainStage::GN2:
            // Ito isometry per index: int_{xi_j}^{xi_{j+1}} cos(u log t)/(2t) dt
            //                       = (sin(u s_{j+1}) - sin(u s_j)) / (2u)
            if (u == 0.0)
                return pairwise_sum(std::size_t{1}, N + 1, [&](std::size_t j) {
                    return 0.5 * (tab.s(j + 1) - tab.s(j)) / (tab.xi(j + 1) - tab.xi(j));
                });
            return pairwise_sum(std::size_t{1}, N + 1, [&](std::size_t j) {
                return (std::sin(u * tab.s(j + 1)) - std::sin(u * tab.s(j))) /
                       (2.0 * u * (tab.xi(j + 1) - tab.xi(j)));
            });
        case ChainStage::GN3:
            // 1/2 int_{s_1}^{s_{N+1}} cos(us)/s ds
            if (u == 0.0) return 0.5 * std::log(tab.s(N + 1) / tab.s(1));
            return 0.5 * (ci(u * tab.s(N + 1)) - ci(u * tab.s(1)));
        case ChainStage::GN4:
            // (2 pi)^{-1} int_{s_1}^{s_{N+1}} c_hat(s) cos(us) ds
            return integrate([&](double s) { return c_hat(s) * std::cos(u * s); },
                             tab.s(1), tab.s(N + 1), 1e-9) /
                   (2.0 * std::numbers::pi);
    }
    throw std::logic_error("chain_covariance: bad stage");
}

inline double reference_covariance(double t, double x, double y) {
    if (!(t > 0)) throw std::invalid_argument("reference_covariance: t > 0 required");
    const double u = std::abs(x - y);
    if (u > 1.0) throw std::domain_error("reference_covariance: |x-y| <= 1 required");
    const double et = std::exp(-t);
    if (u <= et) return 0.5 * (1.0 + t - std::exp(t) * u);
    return -0.5 * std::log(u);
}

// Exact Gaussian sample of the reference field on a uniform grid by
// eigen-factorization of the covariance matrix; eigenvalues are clipped at
// -1e-10 and the clipped mass must stay below 1e-6 of the trace.
inline FieldGrid sample_reference_field(double t, std::size_t grid_size, std::uint64_t seed,
                                        std::uint64_t stream_id = 0) {
    if (grid_size < 2 || grid_size > 4096)
        throw std::invalid_argument("sample_reference_field: grid_size in [2, 4096]");
    const std::size_t M = grid_size;
    Eigen::MatrixXd C(M, M);
    const double h = 1.0 / (double)(M - 1);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = reference_covariance(t, (double)i * h, (double)j * h);
            C((Eigen::Index)i, (Eigen::Index)j) = v;
            C((Eigen::Index)j, (Eigen::Index)i) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    const auto& lam = es.eigenvalues();
    double clipped = 0, trace = 0;
    Eigen::VectorXd scale(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        trace += std::abs(lam[k]);
        if (lam[k] < -1e-10) clipped += -lam[k];
        scale[k] = lam[k] > 0 ? std::sqrt(lam[k]) : 0.0;
    }
    if (clipped > 1e-6 * trace)
        throw std::runtime_error("sample_reference_field: covariance factorization failed "
                                 "(clipped mass above 1e-6 of trace)");
    Eigen::VectorXd z(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        const auto g = normal_pair(seed, stream_id, (std::uint64_t)k);
        z[k] = g[0] * scale[k];
    }
    const Eigen::VectorXd field = es.eigenvectors() * z;
    FieldGrid out{M, std::vector<double>(M), FieldLabel::G, 0};
    for (std::size_t i = 0; i < M; ++i) out.values[i] = field[(Eigen::Index)i];
    return out;
}

struct Js1Report {
    std::size_t N = 0;
    double t = 0;             // log log Li^{-1}(N+1)
    double sup_diff = 0;      // sup over the lag grid of |C_GN4 - C_ref|
    double offdiag_005 = 0, offdiag_01 = 0, offdiag_02 = 0;
    double diag_gap = 0;      // C_GN4(0) - 1/2 log log Li^{-1}(N+1)
};

// Covariance-comparison conditions: a uniform bound on the sup difference and
// vanishing off-diagonal suprema.
inline std::vector<Js1Report> js1_conditions(const std::vector<std::size_t>& n_list,
                                             std::size_t grid_res, const ChainTables& tab) {
    if (grid_res < 200) throw std::invalid_argument("js1_conditions: grid resolution >= 200");
    std::vector<Js1Report> out;
    for (std::size_t N : n_list) {
        Js1Report rep;
        rep.N = N;
        rep.t = std::log(tab.s(N + 1));
        double off[3] = {0, 0, 0};
        const double deltas[3] = {0.05, 0.1, 0.2};
        for (std::size_t k = 0; k <= grid_res; ++k) {
            const double u = (double)k / (double)grid_res;
            const double c4 = chain_covariance(ChainStage::GN4, N, u, 0.0, tab);
            const double cr = reference_covariance(rep.t, u, 0.0);
            const double d = std::abs(c4 - cr);
            rep.sup_diff = std::max(rep.sup_diff, d);
            for (int i = 0; i < 3; ++i)
                if (u > deltas[i]) off[i] = std::max(off[i], d);
            if (k == 0) rep.diag_gap = c4 - 0.5 * rep.t;
        }
        rep.offdiag_005 = off[0];
        rep.offdiag_01 = off[1];
        rep.offdiag_02 = off[2];
        out.push_back(rep);
    }
    return out;
}

} // namespace zeta_chaos
