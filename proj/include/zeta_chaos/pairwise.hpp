#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace zeta_chaos {

// Pairwise (tree) summation.  Rounding error grows like log(n) instead of n,
// which matters for the 10^6..10^7-term prime sums used throughout.
template <typename F>
double pairwise_sum(std::size_t lo, std::size_t hi, F&& term) {
    const std::size_t n = hi - lo;
    if (n <= 64) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

inline double pairwise_sum(std::span<const double> xs) {
    return pairwise_sum(std::size_t{0}, xs.size(), [&](std::size_t i) { return xs[i]; });
}

} // namespace zeta_chaos
