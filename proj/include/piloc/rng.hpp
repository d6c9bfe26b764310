#pragma once

#include <cstdint>
#include <random>

namespace piloc {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; maps (root, stream) to well-separated child seeds so
// per-episode seeds do not depend on worker scheduling.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace piloc
