#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace bhl {

using Engine = std::mt19937_64;

/// Engine for the substream identified by (seed, tags...). Distinct tag
/// lists give statistically independent streams; identical ones replay.
inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> tags = {}) {
    std::seed_seq::result_type words[16];
    std::size_t count = 0;
    words[count++] = static_cast<std::uint32_t>(seed);
    words[count++] = static_cast<std::uint32_t>(seed >> 32);
    for (std::uint64_t t : tags) {
        if (count + 2 > 16) break;
        words[count++] = static_cast<std::uint32_t>(t);
        words[count++] = static_cast<std::uint32_t>(t >> 32);
    }
    std::seed_seq seq(words, words + count);
    return Engine(seq);
}

inline double uniform_phase(Engine& rng) {
    return std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
}

inline std::complex<double> steinhaus(Engine& rng) { return std::polar(1.0, uniform_phase(rng)); }

/// Standard complex normal: real and imaginary parts N(0, 1/2).
inline std::complex<double> complex_gaussian(Engine& rng) {
    std::normal_distribution<double> half(0.0, std::numbers::sqrt2 / 2.0);
    const double re = half(rng);
    const double im = half(rng);
    return {re, im};
}

}  // namespace bhl
