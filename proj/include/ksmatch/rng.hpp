#pragma once

#include <cstdint>
#include <random>

namespace ksmatch {

using Rng = std::mt19937_64;

// Fibonacci-hash increment + splitmix64 finalizer. Full-avalanche stateless
// mix; every (master, index) pair gets an independent-looking stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// Unbiased integer in [0, bound) by rejection. bound must be positive.
inline std::int64_t uniform_index(Rng& rng, std::int64_t bound) {
    const std::uint64_t range = static_cast<std::uint64_t>(bound);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::int64_t>(x % range);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace ksmatch
