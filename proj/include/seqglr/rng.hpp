#pragma once

#include <cstdint>
#include <random>

namespace seqglr {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, scenario, point, replication), so results do
// not depend on scheduling.
inline std::mt19937_64 replication_rng(uint64_t seed, uint64_t scenario, uint64_t point,
                                       uint64_t rep) {
  uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ scenario);
  s = splitmix64(s ^ point);
  s = splitmix64(s ^ rep);
  return std::mt19937_64(s);
}

}  // namespace seqglr
