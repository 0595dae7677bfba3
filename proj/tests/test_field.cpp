#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "zeta_chaos/covariance.hpp"
#include "zeta_chaos/field.hpp"
#include "zeta_chaos/stats.hpp"

using namespace zeta_chaos;

TEST_CASE("phase sampling is deterministic per (seed, stream)") {
    const auto t = build_prime_table(50);
    const auto a = sample_phases(t, 11, 3);
    const auto b = sample_phases(t, 11, 3);
    CHECK(a.theta == b.theta);
    const auto c = sample_phases(t, 11, 4);
    CHECK(a.theta != c.theta);
}

TEST_CASE("single-term field values") {
    const auto t = build_prime_table(1);
    PhaseVector ph{1, {0.0}, 0, 0};
    const auto g = eval_field(ph, t, 1, 3);
    // X_1(0) with theta = 0 is 1/sqrt(2)
    CHECK(g.values[0] == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-15));
    GaussianDraws d{1, {1.0}, {0.0}, 0, 0};
    const auto gg = eval_gaussian_field(d, t, 1, 3);
    // G_1(0) with W1 = 1 is 1/sqrt(2 * 2) = 0.5
    CHECK(gg.values[0] == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("empty sum gives the zero field") {
    const auto t = build_prime_table(5);
    const auto ph = sample_phases(t, 1, 0);
    const auto g = eval_field(ph, t, 0, 17);
    for (double v : g.values) CHECK(v == 0.0);
    const auto d = sample_gaussian_draws(t, 1, 0);
    const auto gg = eval_gaussian_field(d, t, 0, 17);
    for (double v : gg.values) CHECK(v == 0.0);
}

TEST_CASE("rotation recurrence matches direct evaluation") {
    const auto t = build_prime_table(200);
    const auto ph = sample_phases(t, 5, 9);
    const std::size_t M = 3000;  // crosses the 1024-step resync boundary
    const auto g = eval_field(ph, t, 200, M);
    std::vector<double> pts(M);
    for (std::size_t k = 0; k < M; ++k) pts[k] = (double)k / (double)(M - 1);
    const auto direct = eval_field_at(ph, t, 200, pts);
    for (std::size_t k = 0; k < M; ++k)
        CHECK(std::abs(g.values[k] - direct[k]) < 1e-10);
}

TEST_CASE("field variance at a point matches psi_N(0)") {
    const auto t = build_prime_table(100);
    const std::size_t R = 100000;
    double s = 0, s2 = 0;
    const double pt[1] = {0.3};
    for (std::size_t r = 0; r < R; ++r) {
        const auto ph = sample_phases(t, 31, r);
        const double x = eval_field_at(ph, t, 100, pt)[0];
        s += x;
        s2 += x * x;
    }
    const double mean = s / R, var = s2 / R - mean * mean;
    const double psi0 = 0.5 * t.sum_inv_p(100);  // exact prefix-sum oracle
    const double se_var = std::sqrt(2.0 / R) * psi0;  // ~Gaussian approximation
    CHECK(std::abs(mean) < 5 * std::sqrt(psi0 / R));
    CHECK(std::abs(var - psi0) < 3 * se_var * 1.6);  // non-Gaussian fourth-moment slack
}

TEST_CASE("gaussian field covariance matches psi_N at lag") {
    const auto t = build_prime_table(100);
    const std::size_t R = 100000;
    const std::vector<double> pts = {0.2, 0.7};
    std::vector<double> prod(R);
    for (std::size_t r = 0; r < R; ++r) {
        const auto d = sample_gaussian_draws(t, 77, r);
        const auto v = eval_gaussian_field_at(d, t, 100, pts);
        prod[r] = v[0] * v[1];
    }
    const auto ms = mean_se(prod);
    CHECK(std::abs(ms.mean - psi_n(t, 100, 0.5)) < 3 * ms.se);
}

TEST_CASE("block schedule raw values and strictification") {
    const auto t = build_prime_table(2000);
    CHECK_THROWS_AS(build_block_schedule(0.45, t), std::invalid_argument);
    CHECK_THROWS_AS(build_block_schedule(0.0, t), std::invalid_argument);
    // raw formula values at alpha = 1/3
    CHECK((std::size_t)std::exp(std::pow(8.0, 1.0 / 3.0)) == 7);
    CHECK((std::size_t)std::exp(std::pow(27.0, 1.0 / 3.0)) == 20);
    // m = 3 and m = 4 collide at 4: the schedule must deduplicate
    CHECK((std::size_t)std::exp(std::pow(3.0, 1.0 / 3.0)) ==
          (std::size_t)std::exp(std::pow(4.0, 1.0 / 3.0)));
    const auto sched = build_block_schedule(1.0 / 3.0, t);
    REQUIRE(sched.block_count() >= 3);
    CHECK(sched.cuts.front() == 1);
    for (std::size_t i = 1; i < sched.cuts.size(); ++i) {
        CHECK(sched.cuts[i] > sched.cuts[i - 1]);
        CHECK(sched.cuts[i] - sched.cuts[i - 1] >= 2);
    }
    for (const auto& v : sched.validity) {
        CHECK(v.gap_ok);
        CHECK(v.ratio_ok);
    }
}

TEST_CASE("block schedule valid exhaustively on a large table") {
    const auto t = build_prime_table(1000000);
    for (double alpha : {0.1, 1.0 / 3.0, 0.39}) {
        const auto sched = build_block_schedule(alpha, t);
        REQUIRE(sched.block_count() > 10);
        for (std::size_t m = 1; m <= sched.block_count(); ++m) {
            const auto b = sched.block(m);
            REQUIRE(b.last <= t.count());
            CHECK(b.size() >= 2);
            CHECK((double)t.p(b.last) / (double)t.p(b.first) <= 2.0);
        }
    }
}

TEST_CASE("frozen block at x = 0 and b_m value") {
    const auto t = build_prime_table(100);
    const auto sched = build_block_schedule(1.0 / 3.0, t);
    const auto ph = sample_phases(t, 3, 0);
    const auto [grid, bs] = eval_block(ph, t, sched, 2, 65, true);
    CHECK(grid.values[0] == Catch::Approx(bs.C).margin(1e-14));  // cos(0)=1, sin(0)=0
    // block over primes {5, 7, 11}: b = sqrt((1/5 + 1/7 + 1/11)/2)
    Block blk{3, 5};
    CHECK(block_b(t, blk) == Catch::Approx(0.46570711491571275).margin(1e-14));
    // invariant: b^2 equals half the block prefix sum exactly
    for (std::size_t m = 1; m <= sched.block_count(); ++m) {
        const auto b = sched.block(m);
        double direct = 0;
        for (std::size_t j = b.first; j <= b.last; ++j) direct += 1.0 / (double)t.p(j);
        const double bm = block_b(t, b);
        CHECK(bm * bm == Catch::Approx(0.5 * direct).epsilon(1e-14));
    }
}

TEST_CASE("block sums regroup to the full field") {
    const auto t = build_prime_table(3000);
    const auto sched = build_block_schedule(1.0 / 3.0, t);
    const std::size_t n_blocks = std::min<std::size_t>(sched.block_count(), 12);
    const std::size_t n_use = sched.block(n_blocks).last;
    const auto ph = sample_phases(t, 8, 2);
    const std::size_t M = 129;
    const auto full = eval_field(ph, t, n_use, M);
    std::vector<double> acc(M, 0.0);
    for (std::size_t m = 1; m <= n_blocks; ++m) {
        const auto [g, bs] = eval_block(ph, t, sched, m, M, false);
        for (std::size_t k = 0; k < M; ++k) acc[k] += g.values[k];
    }
    for (std::size_t k = 0; k < M; ++k) CHECK(std::abs(acc[k] - full.values[k]) < 1e-10);
}

TEST_CASE("conditional fill satisfies the constraint with normal marginals") {
    const auto t = build_prime_table(64);
    const Block blk{5, 12};
    constexpr double inv_sqrt2 = 0.70710678118654752440;

    // one-prime block with zero target collapses to zero
    const Block one{3, 3};
    const auto f0 = gaussian_conditional_fill(t, one, 0.0, 0.0, 1, 1);
    CHECK(std::abs(f0.w1[0]) < 1e-14);
    CHECK(std::abs(f0.w2[0]) < 1e-14);

    // constraint residual below 1e-12 for random targets
    const double b = block_b(t, blk);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto v = normal_pair(9, 1000, s);
        const auto f = gaussian_conditional_fill(t, blk, b * v[0], b * v[1], 9, s);
        double r1 = -b * v[0], r2 = -b * v[1];
        for (std::size_t i = 0; i < blk.size(); ++i) {
            const double a = t.inv_sqrt_p[blk.first - 1 + i] * inv_sqrt2;
            r1 += a * f.w1[i];
            r2 += a * f.w2[i];
        }
        CHECK(std::abs(r1) < 1e-12);
        CHECK(std::abs(r2) < 1e-12);
    }

    // marginal variance 1 when targets are b * standard normal (1e5 fills)
    const std::size_t R = 100000;
    double s2_first = 0, mean_first = 0;
    for (std::size_t r = 0; r < R; ++r) {
        const auto v = normal_pair(17, 2000, r);
        const auto f = gaussian_conditional_fill(t, blk, b * v[0], b * v[1], 17, r);
        mean_first += f.w1[0];
        s2_first += f.w1[0] * f.w1[0];
    }
    mean_first /= R;
    const double var = s2_first / R - mean_first * mean_first;
    CHECK(std::abs(var - 1.0) < 5 * std::sqrt(2.0 / R));
}

TEST_CASE("error fields: forced coupling cancels E1, freezing exact at x=0") {
    const auto t = build_prime_table(4000);
    const auto sched = build_block_schedule(1.0 / 3.0, t);
    const std::size_t n_blocks = std::min<std::size_t>(sched.block_count(), 10);
    const auto ph = sample_phases(t, 21, 5);
    std::vector<CoupledBlockRealization> real(n_blocks);
    for (std::size_t m = 1; m <= n_blocks; ++m) {
        const Block blk = sched.block(m);
        auto [g, bs] = eval_block(ph, t, sched, m, 2, false);
        // forced coupling: (v1, v2) = (C, S)/b exactly
        bs.v1 = bs.C / bs.b;
        bs.v2 = bs.S / bs.b;
        real[m - 1].sample = bs;
        real[m - 1].fill =
            gaussian_conditional_fill(t, blk, bs.C, bs.S, 21, 5000 + m);
    }
    const auto ef = error_fields(ph, t, sched, real, n_blocks, 257);
    CHECK(ef.sup_e1 < 1e-12);                      // term-by-term cancellation
    CHECK(std::abs(ef.e2.values[0]) < 1e-12);      // freezing is exact at x = 0
    CHECK(std::abs(ef.total.values[0]) < 1e-12);

    // E1 bound: sup|E1| <= sqrt(2) sum_m |(C,S) - b(v1,v2)| on every realization
    std::vector<CoupledBlockRealization> real2(n_blocks);
    double rhs = 0;
    for (std::size_t m = 1; m <= n_blocks; ++m) {
        const Block blk = sched.block(m);
        auto [g, bs] = eval_block(ph, t, sched, m, 2, false);
        const auto v = normal_pair(3, 777, m);
        bs.v1 = v[0];
        bs.v2 = v[1];
        real2[m - 1].sample = bs;
        real2[m - 1].fill =
            gaussian_conditional_fill(t, blk, bs.b * v[0], bs.b * v[1], 3, 6000 + m);
        rhs += std::hypot(bs.C - bs.b * bs.v1, bs.S - bs.b * bs.v2);
    }
    const auto ef2 = error_fields(ph, t, sched, real2, n_blocks, 257);
    CHECK(ef2.sup_e1 <= std::numbers::sqrt2 * rhs + 1e-12);

    CHECK_THROWS_AS(error_fields(ph, t, sched, real2, n_blocks + 50, 17),
                    std::invalid_argument);
}

TEST_CASE("error field increments shrink with more blocks") {
    const auto t = build_prime_table(300000);
    const auto sched = build_block_schedule(1.0 / 3.0, t);
    REQUIRE(sched.block_count() >= 40);
    const std::size_t M = 257;
    const std::size_t levels[3] = {10, 20, 40};
    double inc[2] = {0, 0};
    const std::size_t R = 24;
    for (std::size_t rep = 0; rep < R; ++rep) {
        const auto ph = sample_phases(t, 1234, rep);
        std::vector<CoupledBlockRealization> real(40);
        for (std::size_t m = 1; m <= 40; ++m) {
            const Block blk = sched.block(m);
            auto [g, bs] = eval_block(ph, t, sched, m, 2, false);
            const auto v = normal_pair(1234, mix_stream(rep, 31), m);
            bs.v1 = v[0];
            bs.v2 = v[1];
            real[m - 1].sample = bs;
            real[m - 1].fill = gaussian_conditional_fill(t, blk, bs.b * v[0], bs.b * v[1],
                                                         1234, mix_stream(rep, 32) + m);
        }
        FieldGrid e2_prev;
        for (int li = 0; li < 3; ++li) {
            const auto ef = error_fields(ph, t, sched, real, levels[li], M);
            if (li > 0) {
                double sup = 0;
                for (std::size_t k = 0; k < M; ++k)
                    sup = std::max(sup, std::abs(ef.e2.values[k] - e2_prev.values[k]));
                inc[li - 1] += sup;
            }
            e2_prev = ef.e2;
        }
    }
    CHECK(inc[1] < inc[0]);  // ||E2_40 - E2_20|| < ||E2_20 - E2_10|| on average
}
