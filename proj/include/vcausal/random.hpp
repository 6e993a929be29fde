#pragma once

#include <cstdint>
#include <random>

namespace vcausal {

/// Every Monte Carlo routine draws from this engine. Only the raw 64-bit
/// output of the engine is consumed (see uniform01), so sampled sequences are
/// identical across standard library implementations.
using Stream = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Independent stream for work item `index` of a run seeded with `seed`.
///
/// The engine is initialised through std::seed_seq from the four 32-bit
/// halves of splitmix64(seed) and splitmix64(index ^ 0xD1B54A32D192ED03).
/// Both mixes are bijective, so distinct (seed, index) pairs always give
/// distinct seed sequences.
Stream derive_substream(std::uint64_t seed, std::uint64_t index);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Stream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// True with probability p (p <= 0 never, p >= 1 always).
inline bool bernoulli(Stream& rng, double p) { return uniform01(rng) < p; }

inline bool fair_bit(Stream& rng) { return (rng() >> 63) != 0; }

}  // namespace vcausal
