#pragma once

#include <cstdint>
#include <random>

namespace gprdet {

// splitmix64: the seed-splitting generator used everywhere a reproducible
// stream has to be derived from a base seed and an index (lanes, trees,
// dataset replicates). Derived streams never depend on scheduling, so
// parallel execution cannot change results.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stream seed for sub-task `index` of a task seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (index * 0x9E3779B97F4A7C15ull);
  return splitmix64(s);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(derive_seed(seed, index));
}

}  // namespace gprdet
