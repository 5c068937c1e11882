#pragma once

// Portable seeded randomness. std::mt19937_64 has a fully specified output
// sequence; the distributions below are written out by hand because the
// standard library distributions are implementation-defined.

#include <cstdint>
#include <random>

#include "cyclopack/cyclotomic.hpp"
#include "cyclopack/trace_geometry.hpp"

namespace cyclopack {

using Rng = std::mt19937_64;

/// Uniform integer in [0, n), n > 0, by rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    std::uint64_t v = rng();
    if (v >= threshold) return v % n;
  }
}

/// Uniform integer in [lo, hi].
inline long uniform_between(Rng& rng, long lo, long hi) {
  return lo + static_cast<long>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline Rational random_rational(Rng& rng, long max_abs_num, long max_den) {
  Rational q(uniform_between(rng, -max_abs_num, max_abs_num), uniform_between(rng, 1, max_den));
  q.canonicalize();
  return q;
}

inline CycloElement random_element(const CyclotomicContext& ctx, Rng& rng, long max_abs_num = 9, long max_den = 7) {
  CycloElement e = ctx.zero();
  for (auto& c : e.coords) c = random_rational(rng, max_abs_num, max_den);
  return e;
}

inline CycloElement random_nonzero_element(const CyclotomicContext& ctx, Rng& rng) {
  for (;;) {
    CycloElement e = random_element(ctx, rng);
    if (!e.is_zero()) return e;
  }
}

inline PointEZ random_point(const CyclotomicContext& ctx, Rng& rng) {
  return {random_element(ctx, rng), random_element(ctx, rng)};
}

}  // namespace cyclopack
