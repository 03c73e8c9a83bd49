#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace csplab {

using Seed = std::uint64_t;
using Engine = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a root seed and a path of tags.
inline Seed derive_seed(Seed root, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(root);
  for (std::uint64_t tag : path) h = mix64(h ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return h;
}

// Stream tags shared by the samplers.
inline constexpr std::uint64_t kPlantStream = 0x706c616e74ULL;
inline constexpr std::uint64_t kClauseStream = 0x636c61757365ULL;

inline Engine make_engine(Seed seed) { return Engine(seed); }

// The std distributions are implementation-defined; these are not, which
// keeps samples bit-identical across standard libraries.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1].
inline double uniform01_open_low(Engine& eng) {
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Uniform integer in [0, bound); bound > 0.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x = 0;
  do {
    x = eng();
  } while (x >= limit);
  return x % bound;
}

inline bool coin(Engine& eng) { return (eng() >> 63) != 0; }

/// Standard exponential variate.
inline double exponential(Engine& eng) { return -std::log(uniform01_open_low(eng)); }

}  // namespace csplab
