#pragma once

// Seed derivation for reproducible, order-independent Monte Carlo: every
// trial owns a generator derived from (seed, stream, index) only.

#include <cstdint>
#include <random>

namespace pacr {

using Rng = std::mt19937_64;

enum class Stream : std::uint32_t {
  kPhyNoise = 1,
  kPhyTagDraw = 2,
  kMacTrial = 3,
  kMacRetry = 4,
  kProperty = 5,
};

inline Rng derive_rng(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace pacr
