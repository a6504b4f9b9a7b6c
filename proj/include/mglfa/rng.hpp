#pragma once

#include <cstdint>
#include <random>

namespace mglfa {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and two counters,
/// so that draws do not depend on the order in which work items run.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(mix64(master) ^ (a + 0x632be59bd9b4e019ULL)) ^ (b + 0x85157af5ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return std::mt19937_64(stream_seed(master, a, b));
}

}  // namespace mglfa
