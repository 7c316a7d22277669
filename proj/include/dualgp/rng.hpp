#pragma once

#include <cstdint>
#include <random>

namespace dualgp {

// SplitMix64 mixing step. Used to derive decorrelated sub-streams from a
// single user-facing seed so that adding a consumer never shifts the draws
// seen by existing ones.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x51ed2701a9e3cc71ULL));
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b) {
  return sub_seed(sub_seed(seed, a), b);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace dualgp
