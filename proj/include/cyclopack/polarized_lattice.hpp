#pragma once

// The lattice
//   Gamma(r^2, x) = r I + (r f + (i/r) Id)(O_K),   f(y) = x conj(y),
// stored through unscaled generator pairs (u, v) that stand for the point
// r u + (i/r) v of C^g. The G-action and multiplication by real elements act
// on u and v separately, so lattice membership can be decided on (u, v)
// coordinates without ever forming r = sqrt(r^2).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclopack/cyclotomic.hpp"
#include "cyclopack/matrix.hpp"
#include "cyclopack/trace_geometry.hpp"

namespace cyclopack {

struct PolarizedLattice {
  ContextPtr ctx;
  Rational r_sq;
  CycloElement x;
  /// Generator j is the point r * generators[j].x + (i/r) * generators[j].y.
  std::vector<PointEZ> generators;
  /// Re<gamma_j, gamma_k>.
  RationalMatrix real_gram;
  /// Im<gamma_j, gamma_k>; integral for a Riemann form.
  RationalMatrix symplectic;
  /// Inverse of the 2g x 2g matrix of generator (u, v) coordinates.
  RationalMatrix coordinate_inverse;

  std::size_t rank() const { return generators.size(); }
};

/// Builds the Gram data of the lattice spanned by arbitrary (u, v) generators.
inline PolarizedLattice lattice_from_generators(ContextPtr ctx, const Rational& r_sq, CycloElement x,
                                                std::vector<PointEZ> generators) {
  if (sgn(r_sq) <= 0) throw DomainError("r^2 must be positive");
  const CyclotomicContext& c = *ctx;
  const std::size_t n = generators.size();
  const std::size_t g = c.degree();
  if (n != 2 * g) throw std::invalid_argument("lattice needs 2g generators");
  PolarizedLattice lat{std::move(ctx), r_sq, std::move(x), std::move(generators), {}, {}, {}};
  lat.real_gram = RationalMatrix(n, n);
  lat.symplectic = RationalMatrix(n, n);
  std::vector<CycloElement> u_bar, v_bar;
  for (const auto& p : lat.generators) {
    u_bar.push_back(c.conj(p.x));
    v_bar.push_back(c.conj(p.y));
  }
  const Rational inv_r_sq = 1 / r_sq;
  for (std::size_t j = 0; j < n; ++j) {
    const PointEZ& p = lat.generators[j];
    for (std::size_t k = 0; k < n; ++k) {
      // <r u + i v / r, r u' + i v' / r> = r^2 <u,u'> + <v,v'>/r^2 + i(<v,u'> - <u,v'>).
      if (k >= j) {
        Rational re = r_sq * c.trace(c.mul(p.x, u_bar[k])) + inv_r_sq * c.trace(c.mul(p.y, v_bar[k]));
        lat.real_gram(j, k) = re;
        lat.real_gram(k, j) = re;
      }
      lat.symplectic(j, k) = c.trace(c.mul(p.y, u_bar[k])) - c.trace(c.mul(p.x, v_bar[k]));
    }
  }
  RationalMatrix coords(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < g; ++i) {
      coords(j, i) = lat.generators[j].x.coords[i];
      coords(j, g + i) = lat.generators[j].y.coords[i];
    }
  auto inv = inverse(coords);
  if (!inv) throw DomainError("generators are linearly dependent");
  lat.coordinate_inverse = std::move(*inv);
  return lat;
}

/// Generators (a_j, 0) for a_j in the codifferent basis and (x conj(b_k), b_k)
/// for b_k in the power basis of O_K.
inline std::vector<PointEZ> standard_generators(const CyclotomicContext& c, const CycloElement& x) {
  std::vector<PointEZ> gens;
  for (const auto& a : c.codiff_basis()) gens.push_back({a, c.zero()});
  for (const auto& b : c.ok_basis()) gens.push_back({c.mul(x, c.conj(b)), b});
  return gens;
}

inline PolarizedLattice build_lattice(ContextPtr ctx, const Rational& r_sq, const CycloElement& x) {
  if (sgn(r_sq) <= 0) throw DomainError("r^2 must be positive");
  if (x.degree() != ctx->degree()) throw DomainError("x has the wrong number of coordinates");
  auto gens = standard_generators(*ctx, x);
  return lattice_from_generators(std::move(ctx), r_sq, x, std::move(gens));
}

/// Coordinates of the (u, v) point in the generator basis.
inline RationalVector lattice_coordinates(const PolarizedLattice& lat, const PointEZ& p) {
  const std::size_t g = lat.ctx->degree();
  RationalVector flat(2 * g);
  for (std::size_t i = 0; i < g; ++i) {
    flat[i] = p.x.coords[i];
    flat[g + i] = p.y.coords[i];
  }
  return row_times(flat, lat.coordinate_inverse);
}

inline bool lattice_contains(const PolarizedLattice& lat, const PointEZ& p) {
  return all_integer(lattice_coordinates(lat, p));
}

/// Same point set: every generator of each lattice lies in the other. Both
/// lattices must share r^2.
inline bool same_lattice(const PolarizedLattice& a, const PolarizedLattice& b) {
  if (a.r_sq != b.r_sq) return false;
  for (const auto& p : a.generators)
    if (!lattice_contains(b, p)) return false;
  for (const auto& p : b.generators)
    if (!lattice_contains(a, p)) return false;
  return true;
}

inline bool check_riemann_integrality(const PolarizedLattice& lat) {
  for (std::size_t j = 0; j < lat.rank(); ++j)
    if (!all_integer(lat.symplectic.row(j))) return false;
  return true;
}

inline bool check_unimodular(const PolarizedLattice& lat) {
  return abs(determinant(lat.symplectic)) == 1;
}

inline bool check_g_stability(const PolarizedLattice& lat) {
  const CyclotomicContext& c = *lat.ctx;
  for (const auto& p : lat.generators)
    if (!lattice_contains(lat, g_act(c, GroupElement{1}, p))) return false;
  return true;
}

/// Stability under multiplication by zeta + zeta^{-1}, which generates the
/// ring of integers of the maximal real subfield.
inline bool check_real_multiplication(const PolarizedLattice& lat) {
  const CyclotomicContext& c = *lat.ctx;
  const CycloElement b = c.zeta_power(1) + c.zeta_power(-1);
  for (const auto& p : lat.generators)
    if (!lattice_contains(lat, PointEZ{c.mul(b, p.x), c.mul(b, p.y)})) return false;
  return true;
}

inline nlohmann::json rational_vector_json(std::span<const Rational> v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& q : v) arr.push_back(to_fraction_string(q));
  return arr;
}

inline nlohmann::json to_json(const PolarizedLattice& lat) {
  nlohmann::json j;
  j["m"] = lat.ctx->m();
  j["r_sq"] = to_fraction_string(lat.r_sq);
  j["x"] = rational_vector_json(lat.x.coords);
  nlohmann::json gram = nlohmann::json::array();
  nlohmann::json symp = nlohmann::json::array();
  for (std::size_t r = 0; r < lat.rank(); ++r) {
    gram.push_back(rational_vector_json(lat.real_gram.row(r)));
    nlohmann::json row = nlohmann::json::array();
    for (const auto& q : lat.symplectic.row(r)) {
      if (is_integer(q) && q.get_num().fits_slong_p()) row.push_back(q.get_num().get_si());
      else row.push_back(to_fraction_string(q));
    }
    symp.push_back(std::move(row));
  }
  j["real_gram"] = std::move(gram);
  j["symplectic"] = std::move(symp);
  return j;
}

}  // namespace cyclopack
