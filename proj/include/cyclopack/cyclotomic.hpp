#pragma once

// Exact arithmetic in K = Q(zeta_m), its maximal order Z[zeta_m] and the
// codifferent ideal, all in the power basis {1, zeta, ..., zeta^(g-1)}.

#include <cstddef>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclopack/matrix.hpp"
#include "cyclopack/rational.hpp"

namespace cyclopack {

/// An element of K as g rational power-basis coordinates.
struct CycloElement {
  RationalVector coords;

  CycloElement() = default;
  explicit CycloElement(RationalVector c) : coords(std::move(c)) {}

  std::size_t degree() const { return coords.size(); }

  bool is_zero() const {
    for (const auto& c : coords)
      if (c != 0) return false;
    return true;
  }

  CycloElement& operator+=(const CycloElement& o) {
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] += o.coords[i];
    return *this;
  }
  CycloElement& operator-=(const CycloElement& o) {
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] -= o.coords[i];
    return *this;
  }
  CycloElement& operator*=(const Rational& s) {
    for (auto& c : coords) c *= s;
    return *this;
  }

  friend CycloElement operator+(CycloElement a, const CycloElement& b) { return a += b; }
  friend CycloElement operator-(CycloElement a, const CycloElement& b) { return a -= b; }
  friend CycloElement operator-(CycloElement a) {
    for (auto& c : a.coords) c = -c;
    return a;
  }
  friend CycloElement operator*(const Rational& s, CycloElement a) { return a *= s; }
  friend CycloElement operator*(CycloElement a, const Rational& s) { return a *= s; }
  friend bool operator==(const CycloElement&, const CycloElement&) = default;
};

namespace detail {

using IntPoly = std::vector<Integer>;  // ascending coefficients

inline void trim(IntPoly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

inline IntPoly multiply(const IntPoly& a, const IntPoly& b) {
  IntPoly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// Exact division by a monic divisor; throws on a nonzero remainder.
inline IntPoly divide_exact(IntPoly num, const IntPoly& den) {
  const std::size_t dn = den.size() - 1;
  if (den.back() != 1) throw std::logic_error("divide_exact: divisor not monic");
  if (num.size() - 1 < dn) throw std::logic_error("divide_exact: degree too small");
  IntPoly q(num.size() - dn, 0);
  for (std::size_t k = num.size(); k-- > dn;) {
    Integer lead = num[k];
    q[k - dn] = lead;
    if (lead == 0) continue;
    for (std::size_t j = 0; j <= dn; ++j) num[k - dn + j] -= lead * den[j];
  }
  for (std::size_t i = 0; i < dn; ++i)
    if (num[i] != 0) throw std::logic_error("divide_exact: nonzero remainder");
  trim(q);
  return q;
}

inline IntPoly cyclotomic_polynomial(unsigned long m, std::map<unsigned long, IntPoly>& cache) {
  if (auto it = cache.find(m); it != cache.end()) return it->second;
  IntPoly xm(m + 1, 0);
  xm[0] = -1;
  xm[m] = 1;
  IntPoly divisor{1};
  for (unsigned long d = 1; d < m; ++d)
    if (m % d == 0) divisor = multiply(divisor, cyclotomic_polynomial(d, cache));
  IntPoly phi = divide_exact(xm, divisor);
  cache[m] = phi;
  return phi;
}

}  // namespace detail

/// Coefficients of the m-th cyclotomic polynomial, ascending, obtained by
/// dividing x^m - 1 by the cyclotomic polynomials of the proper divisors.
inline std::vector<Integer> cyclotomic_polynomial(unsigned long m) {
  if (m == 0) throw DomainError("cyclotomic_polynomial: m must be positive");
  std::map<unsigned long, detail::IntPoly> cache;
  return detail::cyclotomic_polynomial(m, cache);
}

/// Precomputed data of Q(zeta_m). Immutable after construction.
class CyclotomicContext {
 public:
  explicit CyclotomicContext(unsigned long m);

  unsigned long m() const { return m_; }
  std::size_t degree() const { return g_; }
  const std::vector<Integer>& phi_coeffs() const { return phi_; }
  /// reduction_table()[j - g] holds the coordinates of zeta^j, g <= j <= 2g-2.
  const std::vector<RationalVector>& reduction_table() const { return reduction_; }
  /// Tr(zeta^j) for 0 <= j <= 2g-2.
  const RationalVector& trace_vec() const { return trace_vec_; }
  /// Matrix of zeta -> zeta^k (column j = image of zeta^j); k coprime to m.
  const RationalMatrix& power_map(unsigned long k) const;
  const std::vector<CycloElement>& ok_basis() const { return ok_basis_; }
  const CycloElement& codiff_gen() const { return codiff_gen_; }
  const std::vector<CycloElement>& codiff_basis() const { return codiff_basis_; }
  const Integer& disc_abs() const { return disc_abs_; }
  /// zeta^k for any integer k (reduced mod m).
  const CycloElement& zeta_power(long k) const;
  /// Exponents k in [1, m) coprime to m, ascending.
  const std::vector<unsigned long>& units_mod_m() const { return units_; }

  CycloElement zero() const { return CycloElement(RationalVector(g_, 0)); }
  CycloElement one() const {
    CycloElement e = zero();
    e.coords[0] = 1;
    return e;
  }
  CycloElement from_rational(const Rational& q) const {
    CycloElement e = zero();
    e.coords[0] = q;
    return e;
  }

  CycloElement mul(const CycloElement& a, const CycloElement& b) const;
  CycloElement conj(const CycloElement& a) const;
  Rational trace(const CycloElement& a) const;
  CycloElement inverse(const CycloElement& a) const;
  /// Phi_m'(zeta); its inverse generates the codifferent over O_K.
  CycloElement different_generator() const;
  /// Image of a under zeta -> zeta^k.
  CycloElement apply_power_map(unsigned long k, const CycloElement& a) const;
  /// Matrix of y -> a*y acting on row coordinate vectors (row j = a*zeta^j).
  RationalMatrix multiplication_matrix(const CycloElement& a) const;
  /// Coordinates of a in codiff_basis.
  RationalVector codiff_coordinates(const CycloElement& a) const;

 private:
  void check(const CycloElement& a) const {
    if (a.coords.size() != g_) throw std::invalid_argument("element of the wrong degree");
  }

  unsigned long m_;
  std::size_t g_;
  std::vector<Integer> phi_;
  std::vector<RationalVector> reduction_;
  RationalVector trace_vec_;
  std::map<unsigned long, RationalMatrix> power_maps_;
  std::vector<CycloElement> zeta_powers_;
  std::vector<unsigned long> units_;
  std::vector<CycloElement> ok_basis_;
  CycloElement different_;
  CycloElement codiff_gen_;
  std::vector<CycloElement> codiff_basis_;
  Integer disc_abs_;
};

using ContextPtr = std::shared_ptr<const CyclotomicContext>;

inline ContextPtr make_context(unsigned long m) { return std::make_shared<const CyclotomicContext>(m); }

inline CyclotomicContext::CyclotomicContext(unsigned long m) : m_(m) {
  if (m < 3) throw DomainError("cyclotomic context needs m >= 3, got " + std::to_string(m));
  phi_ = cyclotomic_polynomial(m);
  g_ = phi_.size() - 1;

  // zeta^g = -sum_{i<g} c_i zeta^i, then shift-and-reduce for higher powers.
  RationalVector current(g_);
  for (std::size_t i = 0; i < g_; ++i) current[i] = -Rational(phi_[i]);
  for (std::size_t j = g_; j + 1 < 2 * g_; ++j) {
    reduction_.push_back(current);
    Rational top = current[g_ - 1];
    RationalVector next(g_, 0);
    for (std::size_t i = g_ - 1; i > 0; --i) next[i] = current[i - 1];
    for (std::size_t i = 0; i < g_; ++i) next[i] -= top * Rational(phi_[i]);
    current = std::move(next);
  }

  // Power sums of the roots of Phi_m (Newton's identities, monic case):
  //   p_k + c_{g-1} p_{k-1} + ... + c_{g-k+1} p_1 + k c_{g-k} = 0   (k <= g)
  //   p_k + c_{g-1} p_{k-1} + ... + c_0 p_{k-g}               = 0   (k > g)
  trace_vec_.assign(2 * g_ - 1, 0);
  trace_vec_[0] = static_cast<unsigned long>(g_);
  for (std::size_t k = 1; k < 2 * g_ - 1; ++k) {
    Rational s = 0;
    for (std::size_t i = 1; i <= std::min(k - 1, g_); ++i) s += Rational(phi_[g_ - i]) * trace_vec_[k - i];
    if (k <= g_) s += Rational(static_cast<unsigned long>(k)) * Rational(phi_[g_ - k]);
    trace_vec_[k] = -s;
  }

  zeta_powers_.reserve(m_);
  CycloElement zeta = zero();
  zeta.coords[1] = 1;
  zeta_powers_.push_back(one());
  for (unsigned long k = 1; k < m_; ++k) zeta_powers_.push_back(mul(zeta_powers_.back(), zeta));

  for (unsigned long k = 1; k < m_; ++k)
    if (std::gcd(k, m_) == 1) units_.push_back(k);
  for (unsigned long k : units_) {
    RationalMatrix pm(g_, g_);
    for (std::size_t j = 0; j < g_; ++j) {
      const CycloElement& img = zeta_powers_[(j * k) % m_];
      for (std::size_t i = 0; i < g_; ++i) pm(i, j) = img.coords[i];
    }
    power_maps_.emplace(k, std::move(pm));
  }

  for (std::size_t j = 0; j < g_; ++j) ok_basis_.push_back(zeta_powers_[j]);

  different_ = zero();
  for (std::size_t i = 1; i <= g_; ++i)
    different_.coords[i - 1] = Rational(phi_[i]) * Rational(static_cast<unsigned long>(i));
  codiff_gen_ = inverse(different_);
  for (std::size_t j = 0; j < g_; ++j) codiff_basis_.push_back(mul(codiff_gen_, zeta_powers_[j]));

  RationalMatrix tr(g_, g_);
  for (std::size_t j = 0; j < g_; ++j)
    for (std::size_t k = 0; k < g_; ++k) tr(j, k) = trace_vec_[j + k];
  Rational d = determinant(tr);
  disc_abs_ = Rational(abs(d)).get_num();
}

inline const RationalMatrix& CyclotomicContext::power_map(unsigned long k) const {
  auto it = power_maps_.find(k % m_);
  if (it == power_maps_.end()) throw DomainError("power_map: exponent not coprime to m");
  return it->second;
}

inline const CycloElement& CyclotomicContext::zeta_power(long k) const {
  long r = k % static_cast<long>(m_);
  if (r < 0) r += static_cast<long>(m_);
  return zeta_powers_[static_cast<std::size_t>(r)];
}

inline CycloElement CyclotomicContext::mul(const CycloElement& a, const CycloElement& b) const {
  check(a);
  check(b);
  RationalVector prod(2 * g_ - 1, 0);
  for (std::size_t i = 0; i < g_; ++i) {
    if (a.coords[i] == 0) continue;
    for (std::size_t j = 0; j < g_; ++j)
      if (b.coords[j] != 0) prod[i + j] += a.coords[i] * b.coords[j];
  }
  CycloElement out(RationalVector(prod.begin(), prod.begin() + static_cast<long>(g_)));
  for (std::size_t j = g_; j < 2 * g_ - 1; ++j) {
    if (prod[j] == 0) continue;
    const RationalVector& red = reduction_[j - g_];
    for (std::size_t i = 0; i < g_; ++i) out.coords[i] += prod[j] * red[i];
  }
  return out;
}

inline CycloElement CyclotomicContext::apply_power_map(unsigned long k, const CycloElement& a) const {
  check(a);
  const RationalMatrix& pm = power_map(k);
  CycloElement out = zero();
  for (std::size_t i = 0; i < g_; ++i)
    for (std::size_t j = 0; j < g_; ++j)
      if (a.coords[j] != 0) out.coords[i] += pm(i, j) * a.coords[j];
  return out;
}

inline CycloElement CyclotomicContext::conj(const CycloElement& a) const {
#ifdef CYCLOPACK_FAULT_IDENTITY_CONJ
  return a;
#else
  return apply_power_map(m_ - 1, a);
#endif
}

inline Rational CyclotomicContext::trace(const CycloElement& a) const {
  check(a);
  Rational s = 0;
  for (std::size_t j = 0; j < g_; ++j) s += a.coords[j] * trace_vec_[j];
  return s;
}

inline RationalMatrix CyclotomicContext::multiplication_matrix(const CycloElement& a) const {
  RationalMatrix mm(g_, g_);
  for (std::size_t j = 0; j < g_; ++j) {
    CycloElement p = mul(a, zeta_powers_[j]);
    for (std::size_t i = 0; i < g_; ++i) mm(j, i) = p.coords[i];
  }
  return mm;
}

inline CycloElement CyclotomicContext::inverse(const CycloElement& a) const {
  check(a);
  if (a.is_zero()) throw DomainError("inverse of zero");
  // Find y with y * a = 1: rows of the multiplication matrix are a*zeta^j.
  RationalMatrix mm = multiplication_matrix(a).transpose();
  RationalVector rhs(g_, 0);
  rhs[0] = 1;
  auto sol = solve(mm, rhs);
  if (!sol) throw std::logic_error("inverse: singular multiplication matrix");
  return CycloElement(std::move(*sol));
}

inline CycloElement CyclotomicContext::different_generator() const { return different_; }

inline RationalVector CyclotomicContext::codiff_coordinates(const CycloElement& a) const {
  // a = sum_j c_j codiff_gen zeta^j  <=>  a * Phi'(zeta) = sum_j c_j zeta^j.
  return mul(a, different_).coords;
}

}  // namespace cyclopack
