#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace arena::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Combines a seed with a list of stream labels into one 64-bit stream key.
/// Streams derived from distinct label tuples are independent for practical
/// purposes; the same tuple always yields the same key.
inline constexpr std::uint64_t derive(std::uint64_t seed,
                                      std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t p : parts) {
        h = splitmix64(h ^ splitmix64(p));
    }
    return h;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    return Engine(derive(seed, parts));
}

/// Uniform in [0, 1) from the top 53 bits of one engine draw.
inline double u01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Standard normal via stateless Box-Muller. Hand-rolled (rather than
/// std::normal_distribution) so that streams are identical across standard
/// library implementations.
inline double normal01(Engine& eng) {
    const double u1 = 1.0 - u01(eng);  // (0, 1]
    const double u2 = u01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace arena::rng
