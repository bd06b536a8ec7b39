#pragma once

#include "tmds/types.hpp"

#include <cmath>
#include <limits>
#include <random>

// Seeded randomness helpers. std::mt19937_64 has a standard-mandated output
// sequence, and all value transforms below are written out explicitly, so
// every generator in this library is reproducible across platforms and
// compilers. The <random> distribution classes are implementation-defined
// and therefore not used.

namespace tmds {

using rng_t = std::mt19937_64;

namespace detail {
inline seed_t splitmix64(seed_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  seed_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Derives an independent stream seed from (seed, tag). Used so that
/// per-edge or per-instance substreams do not depend on iteration order.
inline seed_t mix_seed(seed_t seed, seed_t tag) {
  seed_t s = seed;
  seed_t h = detail::splitmix64(s);
  s ^= tag + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return detail::splitmix64(s);
}

inline seed_t mix_seed(seed_t seed, seed_t a, seed_t b) {
  return mix_seed(mix_seed(seed, a), b);
}

/// Uniform double in [0, 1), 53 mantissa bits.
inline scalar_t unit_uniform(rng_t& gen) {
  return static_cast<scalar_t>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Rejection sampling, exactly unbiased.
inline std::uint64_t uniform_below(rng_t& gen, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t excess = (max % n + 1) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t v = gen();
    if (excess == 0 || v <= max - excess) return v % n;
  }
}

/// Standard normal via Box-Muller. Consumes two engine draws per call.
inline scalar_t standard_normal(rng_t& gen) {
  const scalar_t u1 = (static_cast<scalar_t>(gen() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const scalar_t u2 = static_cast<scalar_t>(gen() >> 11) * 0x1.0p-53;          // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace tmds
