#pragma once

#include <cstdint>
#include <random>

namespace shapekit {

// splitmix64; used to derive independent substream seeds so that results
// do not depend on how work is scheduled across threads.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return mix64(mix64(seed ^ mix64(a)) ^ mix64(b + 0x51ed270b0a1c2ef3ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(mix64(seed));
}

}  // namespace shapekit
