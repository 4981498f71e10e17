#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace qlof {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator for (seed, stream, index). Per-point work draws from
/// its own stream so results do not depend on scheduling order.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0) {
    return Rng(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index));
}

/// Uniform double in [0, 1) built from the top 53 bits; identical across
/// standard library implementations, unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

/// Draws an index from an (approximately normalized) probability vector.
inline std::size_t sample_index(std::span<const double> probs, Rng& rng) {
    double total = 0.0;
    for (double p : probs) total += p;
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        acc += probs[i];
        last_nonzero = i;
        if (u < acc) return i;
    }
    return last_nonzero;
}

} // namespace qlof
