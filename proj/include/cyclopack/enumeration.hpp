#pragma once

// Point-in-ball enumeration and shortest vectors for rational Gram matrices.
//
// Pruning runs on a long double Cholesky factor of the LLL-reduced Gram
// matrix with a small relative slack; every candidate is then confirmed with
// exact rational arithmetic, so the reported sets and minima are exact.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cyclopack/interval.hpp"
#include "cyclopack/lattice_reduction.hpp"
#include "cyclopack/matrix.hpp"

namespace cyclopack {

class BallEnumerator {
 public:
  explicit BallEnumerator(const RationalMatrix& gram) : gram_(gram) {
    if (!gram.is_square() || gram.rows() == 0) throw DomainError("BallEnumerator: empty or non-square gram");
    LllResult red = lll_reduce(gram);
    transform_ = std::move(red.transform);
    reduced_ = std::move(red.reduced_gram);
    auto inv = inverse(to_rational(transform_).transpose());
    if (!inv) throw std::logic_error("BallEnumerator: singular transform");
    inv_transform_t_ = std::move(*inv);
    factor();
  }

  std::size_t dimension() const { return gram_.rows(); }
  const RationalMatrix& gram() const { return gram_; }
  const RationalMatrix& reduced_gram() const { return reduced_; }
  const IntegerMatrix& transform() const { return transform_; }

  /// Calls visit(v, Q(v - center)) for every integer v with Q(v - center) <= radius_sq.
  /// Vectors are in the coordinates of the input basis.
  void for_each(std::span<const Rational> center, const Rational& radius_sq,
                const std::function<void(const IntegerVector&, const Rational&)>& visit) const {
    if (center.size() != dimension()) throw std::invalid_argument("for_each: center has wrong size");
    if (sgn(radius_sq) < 0) return;
    RationalVector c_red = to_reduced(center);
    Rational bound = radius_sq;
    search(c_red, [&](const std::vector<long long>& w, const Rational& q) {
      if (q <= bound) visit(to_input(w), q);
      return std::optional<Rational>{};
    }, bound);
  }

  std::vector<IntegerVector> enumerate(std::span<const Rational> center, const Rational& radius_sq) const {
    std::vector<IntegerVector> out;
    for_each(center, radius_sq, [&](const IntegerVector& v, const Rational&) { out.push_back(v); });
    return out;
  }

  /// Number of integer v with Q(v - center) <= radius_sq.
  std::size_t count(std::span<const Rational> center, const Rational& radius_sq) const {
    std::size_t n = 0;
    if (sgn(radius_sq) < 0) return 0;
    RationalVector c_red = to_reduced(center);
    Rational bound = radius_sq;
    search(c_red, [&](const std::vector<long long>&, const Rational& q) {
      if (q <= bound) ++n;
      return std::optional<Rational>{};
    }, bound);
    return n;
  }

  /// Exact lambda_1^2: minimum of Q over nonzero integer vectors.
  Rational shortest_norm_sq() const {
    Rational best = reduced_(0, 0);
    for (std::size_t i = 1; i < reduced_.rows(); ++i) best = std::min(best, reduced_(i, i));
    RationalVector zero(dimension(), 0);
    search(zero, [&](const std::vector<long long>& w, const Rational& q) -> std::optional<Rational> {
      bool nonzero = false;
      for (long long x : w) nonzero = nonzero || x != 0;
      if (nonzero && q < best) {
        best = q;
        return best;
      }
      return std::nullopt;
    }, best);
    return best;
  }

 private:
  RationalVector to_reduced(std::span<const Rational> center) const {
    // v = U^T w, so the reduced center is U^{-T} c.
    RationalVector out(dimension(), 0);
    for (std::size_t i = 0; i < dimension(); ++i)
      for (std::size_t j = 0; j < dimension(); ++j)
        if (center[j] != 0) out[i] += inv_transform_t_(i, j) * center[j];
    return out;
  }

  IntegerVector to_input(const std::vector<long long>& w) const {
    IntegerVector v(dimension(), 0);
    for (std::size_t i = 0; i < dimension(); ++i) {
      if (w[i] == 0) continue;
      Integer wi(static_cast<long>(w[i]));
      for (std::size_t j = 0; j < dimension(); ++j) v[j] += wi * transform_(i, j);
    }
    return v;
  }

  void factor() {
    const std::size_t n = dimension();
    std::vector<std::vector<long double>> r(n, std::vector<long double>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      long double d = reduced_(i, i).get_d();
      for (std::size_t k = 0; k < i; ++k) d -= r[k][i] * r[k][i];
      if (!(d > 0)) throw DomainError("gram matrix is numerically not positive definite");
      r[i][i] = std::sqrt(d);
      for (std::size_t j = i + 1; j < n; ++j) {
        long double s = reduced_(i, j).get_d();
        for (std::size_t k = 0; k < i; ++k) s -= r[k][i] * r[k][j];
        r[i][j] = s / r[i][i];
      }
    }
    diag_.assign(n, 0);
    mu_.assign(n, std::vector<long double>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      diag_[i] = r[i][i] * r[i][i];
      for (std::size_t j = i + 1; j < n; ++j) mu_[i][j] = r[i][j] / r[i][i];
    }
  }

  static long double slack(long double x) { return x * 1e-9L + 1e-12L; }

  Rational exact_value(const std::vector<long long>& w, const RationalVector& c) const {
    const std::size_t n = dimension();
    RationalVector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = Rational(static_cast<long>(w[i])) - c[i];
    return quadratic_form(reduced_, y);
  }

  // Depth-first enumeration from the last coordinate. `candidate` may return
  // a smaller exact bound, which tightens the remaining search.
  template <class F>
  void search(const RationalVector& c, F&& candidate, const Rational& initial_bound) const {
    const std::size_t n = dimension();
    std::vector<long double> cf(n);
    for (std::size_t i = 0; i < n; ++i) cf[i] = c[i].get_d();
    long double bound = initial_bound.get_d();
    bound += slack(bound);
    std::vector<long long> w(n, 0);
    std::vector<long double> y(n, 0);
    recurse(n, 0.0L, c, cf, w, y, bound, candidate);
  }

  template <class F>
  void recurse(std::size_t level, long double partial, const RationalVector& c, const std::vector<long double>& cf,
               std::vector<long long>& w, std::vector<long double>& y, long double& bound, F& candidate) const {
    if (level == 0) {
      Rational q = exact_value(w, c);
      if (auto tighter = candidate(w, q)) {
        bound = tighter->get_d();
        bound += slack(bound);
      }
      return;
    }
    const std::size_t i = level - 1;
    long double center = cf[i];
    for (std::size_t j = i + 1; j < dimension(); ++j) center -= mu_[i][j] * y[j];
    long double remaining = bound - partial;
    if (remaining < 0) return;
    long double half = std::sqrt(remaining / diag_[i]) + 1e-9L;
    long double lo = std::ceil(center - half), hi = std::floor(center + half);
    if (hi - lo > 1e12L) throw std::overflow_error("enumeration range too large");
    for (long long v = static_cast<long long>(lo); v <= static_cast<long long>(hi); ++v) {
      w[i] = v;
      y[i] = static_cast<long double>(v) - cf[i];
      long double t = static_cast<long double>(v) - center;
      long double next = partial + diag_[i] * t * t;
      if (next > bound) continue;
      recurse(level - 1, next, c, cf, w, y, bound, candidate);
    }
    w[i] = 0;
    y[i] = 0;
  }

  RationalMatrix gram_;
  IntegerMatrix transform_;
  RationalMatrix reduced_;
  RationalMatrix inv_transform_t_;
  std::vector<long double> diag_;
  std::vector<std::vector<long double>> mu_;
};

inline std::vector<IntegerVector> enumerate_in_ball(const RationalMatrix& gram, std::span<const Rational> center,
                                                    const Rational& radius_sq) {
  return BallEnumerator(gram).enumerate(center, radius_sq);
}

inline Rational shortest_norm_sq(const RationalMatrix& gram) { return BallEnumerator(gram).shortest_norm_sq(); }

/// Enclosure of (v_n / 2^n) lambda_1^n for a covolume-1 lattice of rank n.
inline IntervalValue packing_density(const RationalMatrix& gram, unsigned bits = kDefaultPrecisionBits) {
  const std::size_t n = gram.rows();
  if (determinant(gram) != 1) throw DomainError("packing_density: gram determinant must be 1");
  Rational l1 = shortest_norm_sq(gram);
  IntervalValue power = IntervalValue(l1).pow(n / 2);
  if (n % 2 == 1) power = power * sqrt_interval(IntervalValue(l1), bits + 8);
  Integer two_n = 1;
  two_n <<= n;
  return (ball_volume(n, bits + 8) * power / Rational(two_n)).rounded(bits);
}

}  // namespace cyclopack
