#pragma once

#include <cstdint>
#include <random>

namespace gibbsam {
namespace rng {

using Engine = std::mt19937_64;

/// One round of the splitmix64 output function.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives a stream seed from a master seed and up to three stream labels.
/// Used to give every (iteration, phase, candidate) its own engine so that
/// scoring order and execution strategy cannot change the draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix(master);
  s = mix(s ^ mix(a + 1));
  s = mix(s ^ mix(b + 2));
  s = mix(s ^ mix(c + 3));
  return s;
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

inline double uniform01(Engine& eng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(eng);
}

inline double std_normal(Engine& eng) {
  return std::normal_distribution<double>(0.0, 1.0)(eng);
}

}  // namespace rng
}  // namespace gibbsam
