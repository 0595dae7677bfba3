#pragma once

// Deterministic fork-join helper for Monte Carlo loops.  Work is split into
// fixed chunks by sample index; each chunk accumulates sequentially and the
// chunk results are combined in chunk order, so the output is bit-identical
// for any worker count.

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace zeta_chaos {

inline unsigned default_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
}

// body(chunk_index, sample_begin, sample_end) must write only to slots owned
// by chunk_index.
template <typename Body>
void parallel_chunks(std::size_t n_items, std::size_t chunk_size, unsigned workers,
                     Body&& body) {
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
    if (workers <= 1 || n_chunks <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            body(c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            body(c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size));
        }
    };
    std::vector<std::thread> pool;
    const unsigned n_threads = (unsigned)std::min<std::size_t>(workers, n_chunks);
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
}

// Order-independent reduction of per-chunk sums: pairwise tree over the chunk
// array, fixed shape regardless of how chunks were scheduled.
inline double reduce_chunks(const std::vector<double>& chunk_sums) {
    std::vector<double> v = chunk_sums;
    while (v.size() > 1) {
        std::vector<double> w((v.size() + 1) / 2);
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = (2 * i + 1 < v.size()) ? v[2 * i] + v[2 * i + 1] : v[2 * i];
        v.swap(w);
    }
    return v.empty() ? 0.0 : v[0];
}

} // namespace zeta_chaos
