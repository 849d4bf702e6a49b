#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gkp {

// Seed derivation and shuffling live here instead of <random>'s distributions
// because distribution output is implementation-defined; these are fixed
// algorithms, so runs reproduce bit-for-bit on any platform.

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform integer in [0, n) by rejection sampling.
inline std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % n;
}

// Uniform double in [0, 1).
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded_uniform(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace gkp
