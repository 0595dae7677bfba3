#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace zeta_chaos {

struct MeanSE {
    double mean = 0, se = 0;
    std::size_t n = 0;
};

inline MeanSE mean_se(std::span<const double> xs) {
    MeanSE r;
    r.n = xs.size();
    if (r.n == 0) return r;
    double s = 0;
    for (double x : xs) s += x;
    r.mean = s / (double)r.n;
    double v = 0;
    for (double x : xs) v += (x - r.mean) * (x - r.mean);
    r.se = r.n > 1 ? std::sqrt(v / ((double)r.n * (double)(r.n - 1))) : 0.0;
    return r;
}

// Jackknife-over-blocks standard error of the sample mean; more honest than
// the plain SE when the summands are heavy-tailed.
inline MeanSE jackknife_mean_se(std::span<const double> xs, std::size_t n_blocks = 50) {
    MeanSE r;
    r.n = xs.size();
    if (r.n == 0) return r;
    n_blocks = std::min(n_blocks, r.n);
    std::vector<double> block_sum(n_blocks, 0.0);
    std::vector<std::size_t> block_cnt(n_blocks, 0);
    for (std::size_t i = 0; i < r.n; ++i) {
        block_sum[i % n_blocks] += xs[i];
        block_cnt[i % n_blocks] += 1;
    }
    double total = 0;
    for (double s : block_sum) total += s;
    r.mean = total / (double)r.n;
    double v = 0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const double leave_out = (total - block_sum[b]) / (double)(r.n - block_cnt[b]);
        v += (leave_out - r.mean) * (leave_out - r.mean);
    }
    const double B = (double)n_blocks;
    r.se = std::sqrt(v * (B - 1.0) / B);
    return r;
}

struct Quartiles {
    double q1 = 0, median = 0, q3 = 0;
};

inline Quartiles quartiles(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("quartiles: empty sample");
    std::sort(xs.begin(), xs.end());
    auto pick = [&](double p) {
        const double idx = p * (double)(xs.size() - 1);
        const std::size_t lo = (std::size_t)idx;
        const double frac = idx - (double)lo;
        return lo + 1 < xs.size() ? xs[lo] * (1 - frac) + xs[lo + 1] * frac : xs[lo];
    };
    return {pick(0.25), pick(0.5), pick(0.75)};
}

// Kolmogorov-Smirnov statistic against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = (double)xs.size();
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf(xs[i]);
        d = std::max(d, std::max(F - (double)i / n, (double)(i + 1) / n - F));
    }
    return d;
}

// Critical value at level 1% (Stephens' small-sample form of the asymptotic
// Kolmogorov distribution).
inline double ks_critical_1pct(std::size_t n) {
    const double sn = std::sqrt((double)n);
    return 1.6276 / (sn + 0.12 + 0.11 / sn);
}

struct LineFit {
    double slope = 0, intercept = 0, slope_se = 0;
};

// Weighted least squares of y on x with weights w = 1/var(y).
inline LineFit wls_line(std::span<const double> x, std::span<const double> y,
                        std::span<const double> w) {
    if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
        throw std::invalid_argument("wls_line: need matching arrays, size >= 2");
    double sw = 0, swx = 0, swy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
    }
    const double xb = swx / sw, yb = swy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xb) * (x[i] - xb);
        sxy += w[i] * (x[i] - xb) * (y[i] - yb);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = yb - f.slope * xb;
    f.slope_se = std::sqrt(1.0 / sxx);
    return f;
}

} // namespace zeta_chaos
