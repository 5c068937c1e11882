#pragma once

// Euclidean structure of E = K (x) R and of C^g = E + iE, restricted to
// rational points. <a, b> = Tr(a conj(b)).

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cyclopack/cyclotomic.hpp"
#include "cyclopack/matrix.hpp"

namespace cyclopack {

/// The point x + iy of C^g with x, y rational points of E.
struct PointEZ {
  CycloElement x;
  CycloElement y;

  friend bool operator==(const PointEZ&, const PointEZ&) = default;
};

/// zeta^k in the cyclic group of order m generated by zeta.
struct GroupElement {
  unsigned long k = 0;
};

inline Rational pairing(const CyclotomicContext& ctx, const CycloElement& a, const CycloElement& b) {
  return ctx.trace(ctx.mul(a, ctx.conj(b)));
}

/// Gram matrix of the trace pairing. Throws DomainError when singular.
inline RationalMatrix gram(const CyclotomicContext& ctx, const std::vector<CycloElement>& basis) {
  const std::size_t n = basis.size();
  RationalMatrix gm(n, n);
  std::vector<CycloElement> conjugates;
  conjugates.reserve(n);
  for (const auto& b : basis) conjugates.push_back(ctx.conj(b));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      gm(j, k) = ctx.trace(ctx.mul(basis[j], conjugates[k]));
      gm(k, j) = gm(j, k);
    }
  if (determinant(gm) == 0) throw DomainError("gram: basis is linearly dependent");
  return gm;
}

inline Rational norm_sq(const CyclotomicContext& ctx, const PointEZ& p) {
  return pairing(ctx, p.x, p.x) + pairing(ctx, p.y, p.y);
}

/// zeta^k * (x + iy) = zeta^k x + i conj(zeta^k) y.
inline PointEZ g_act(const CyclotomicContext& ctx, GroupElement k, const PointEZ& p) {
  const CycloElement& u = ctx.zeta_power(static_cast<long>(k.k));
  const CycloElement& u_bar = ctx.zeta_power(-static_cast<long>(k.k));
  return {ctx.mul(u, p.x), ctx.mul(u_bar, p.y)};
}

// Floating embeddings; diagnostics only.
using Real = boost::multiprecision::mpfr_float;

struct ComplexReal {
  Real re;
  Real im;
};

/// (sigma_k(a)) for k coprime to m in increasing order, sigma_k(zeta) = e^{2 pi i k / m}.
inline std::vector<ComplexReal> embed(const CyclotomicContext& ctx, const CycloElement& a,
                                      unsigned precision_bits) {
  if (precision_bits < 53) throw DomainError("embed: precision below 53 bits");
  const unsigned digits = precision_bits * 30103u / 100000u + 2;
  Real::default_precision(digits);
  const Real pi = boost::math::constants::pi<Real>();
  std::vector<ComplexReal> out;
  for (unsigned long k : ctx.units_mod_m()) {
    ComplexReal s{Real(0), Real(0)};
    for (std::size_t j = 0; j < a.coords.size(); ++j) {
      if (a.coords[j] == 0) continue;
      Real angle = 2 * pi * Real((j * k) % ctx.m()) / Real(ctx.m());
      Real c;
      mpfr_set_q(c.backend().data(), a.coords[j].get_mpq_t(), MPFR_RNDN);
      s.re += c * cos(angle);
      s.im += c * sin(angle);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cyclopack
