#pragma once

#include <cstdint>
#include <random>

namespace slowbond {

/// 64-bit Mersenne twister; period 2^19937 - 1.
using Rng = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream seed for replica r. For a fixed base seed the map r -> seed is
/// injective (composition of bijections).
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replica) {
  return mix64(base_seed ^ mix64(replica + 0x9e3779b97f4a7c15ULL));
}

inline Rng make_stream(std::uint64_t base_seed, std::uint64_t replica) {
  return Rng(derive_seed(base_seed, replica));
}

/// Uniform double in [0,1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace slowbond
