#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace swirl {

using Rng = std::mt19937_64;

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-stage seed: the stage name's FNV-1a hash mixed into the global seed.
/// Stages seeded this way draw independent streams from one `--seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) {
    return splitmix64(seed ^ fnv1a64(stage));
}

/// Uniform index in [0, n). Avoids std::uniform_int_distribution so the
/// stream is identical across standard library implementations.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    // Lemire's nearly-divisionless method.
    std::uint64_t x = rng();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        std::uint64_t t = (0 - static_cast<std::uint64_t>(n)) % n;
        while (low < t) {
            x = rng();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::size_t>(m >> 64);
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; portable across standard libraries.
inline double standard_normal(Rng& rng) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

template <class It>
void shuffle(It first, It last, Rng& rng) {
    auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap(first[i - 1], first[j]);
    }
}

}  // namespace swirl
