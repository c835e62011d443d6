#ifndef QUENCHMIT_SEEDS_HPP
#define QUENCHMIT_SEEDS_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace quenchmit {

// splitmix64 finalizer; the standard 64-bit avalanche mix.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed derived from a master seed, a role tag, and indices.
// Distinct roles give statistically independent streams, so disabling one
// consumer never shifts another consumer's randomness.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t role,
                                std::initializer_list<std::uint64_t> indices = {}) {
  std::uint64_t h = mix64(master ^ 0x517cc1b727220a95ULL);
  h = mix64(h ^ role);
  for (std::uint64_t ix : indices) h = mix64(h ^ ix);
  return h;
}

// Role tags for child_seed. Fixed constants, part of the output contract:
// changing them changes every derived stream.
namespace seed_role {
constexpr std::uint64_t kRepeat = 1;
constexpr std::uint64_t kTrainingCircuit = 2;
constexpr std::uint64_t kBootstrap = 3;
constexpr std::uint64_t kTrainingShots = 4;
}  // namespace seed_role

// Uniform double in [0,1) from the top 53 bits of the generator output.
// Hand-rolled so sampled values do not depend on the standard library's
// unspecified distribution implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace quenchmit

#endif
