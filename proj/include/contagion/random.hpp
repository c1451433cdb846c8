#pragma once

#include <cstdint>
#include <random>

namespace contagion {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of substream `index` under `master`. Fixed forever: changing it
/// changes every ensemble written to disk.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

/// Uniform double in [0, 1) from the top 53 bits. Used instead of
/// std::uniform_real_distribution so draws do not depend on the standard
/// library implementation.
inline double uniform01(Engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace contagion
