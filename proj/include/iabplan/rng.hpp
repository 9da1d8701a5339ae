#pragma once

#include <cstdint>
#include <random>

namespace iab::detail {

// splitmix64 finalizer, used to derive independent streams from (seed, ...) tuples.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(mix64(a) ^ b); }

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(mix64(a, b) ^ c);
}

// Uniform double in [0, 1) with 53 random bits. std::uniform_real_distribution is
// implementation-defined, so generated scenarios would differ across standard libraries.
inline double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace iab::detail
