#pragma once

// Counter-based RNG (Philox4x32-10).  Draw j of stream s depends only on
// (seed, s, j), so Monte Carlo results are reproducible independent of
// evaluation order and worker count.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace zeta_chaos {

namespace detail {

inline void philox_round(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2,
                         std::uint32_t& c3, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = 0xD2511F53ull * c0;
    const std::uint64_t p1 = 0xCD9E8D57ull * c2;
    const std::uint32_t hi0 = (std::uint32_t)(p0 >> 32), lo0 = (std::uint32_t)p0;
    const std::uint32_t hi1 = (std::uint32_t)(p1 >> 32), lo1 = (std::uint32_t)p1;
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
}

} // namespace detail

inline std::array<std::uint32_t, 4> philox4(std::uint64_t seed, std::uint64_t stream,
                                            std::uint64_t index) {
    std::uint32_t c0 = (std::uint32_t)index, c1 = (std::uint32_t)(index >> 32);
    std::uint32_t c2 = (std::uint32_t)stream, c3 = (std::uint32_t)(stream >> 32);
    std::uint32_t k0 = (std::uint32_t)seed, k1 = (std::uint32_t)(seed >> 32);
    for (int r = 0; r < 10; ++r) {
        detail::philox_round(c0, c1, c2, c3, k0, k1);
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
    return {c0, c1, c2, c3};
}

// Uniform double in [0,1) from two 32-bit words (53 random bits).
inline double u01(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t u = ((std::uint64_t)hi << 32) | lo;
    return (double)(u >> 11) * 0x1.0p-53;
}

// Uniform double in (0,1]; safe as a log() argument.
inline double u01_open(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t u = ((std::uint64_t)hi << 32) | lo;
    return (double)((u >> 11) + 1) * 0x1.0p-53;
}

inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const auto w = philox4(seed, stream, index);
    return u01(w[0], w[1]);
}

// Phase in [0, 2 pi).
inline double uniform_phase(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return 2.0 * std::numbers::pi * uniform01(seed, stream, index);
}

// Two independent standard normals per counter (Box-Muller on one Philox block).
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                         std::uint64_t index) {
    const auto w = philox4(seed, stream, index);
    const double u1 = u01_open(w[0], w[1]);
    const double u2 = u01(w[2], w[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

// Stream-id mixer for internal sub-draws that must not collide with caller
// streams (splitmix64 finalizer).
inline std::uint64_t mix_stream(std::uint64_t stream, std::uint64_t salt) {
    std::uint64_t z = stream + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace zeta_chaos
