#pragma once

#include <cstdint>
#include <random>

namespace slateq {

// All randomness in the library flows through explicitly passed engines of
// this type. Identical seeds give identical streams within one build.
using Rng = std::mt19937_64;

// Derives an independent engine for (seed, stream). Used to give every
// evaluation user and every experiment phase its own reproducible stream.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x5ea7e0u};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace slateq
