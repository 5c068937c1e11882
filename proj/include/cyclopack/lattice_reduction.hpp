#pragma once

// Exact LLL reduction of a lattice given by its rational Gram matrix.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cyclopack/matrix.hpp"
#include "cyclopack/rational.hpp"

namespace cyclopack {

struct LllResult {
  /// Row i holds the coordinates of the i-th reduced vector in the input basis.
  IntegerMatrix transform;
  RationalMatrix reduced_gram;
};

inline const Rational kLovaszDelta(99, 100);

namespace detail {

// Gram-Schmidt coefficients mu and squared lengths B of a Gram matrix.
// Throws DomainError when the matrix is not positive definite.
inline void gram_schmidt(const RationalMatrix& gram, RationalMatrix& mu, RationalVector& b) {
  const std::size_t n = gram.rows();
  mu = RationalMatrix(n, n);
  b.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      Rational s = gram(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= mu(j, k) * mu(i, k) * b[k];
      mu(i, j) = s / b[j];
    }
    Rational s = gram(i, i);
    for (std::size_t k = 0; k < i; ++k) s -= mu(i, k) * mu(i, k) * b[k];
    if (sgn(s) <= 0) throw DomainError("gram matrix is not positive definite");
    b[i] = s;
    mu(i, i) = 1;
  }
}

}  // namespace detail

/// LLL with delta = 99/100 acting on a Gram matrix. Size reduction rounds
/// exact halves toward zero.
inline LllResult lll_reduce(const RationalMatrix& gram) {
  if (!gram.is_symmetric()) throw DomainError("lll_reduce: gram matrix is not symmetric");
  const std::size_t n = gram.rows();
  RationalMatrix g = gram;
  IntegerMatrix u = IntegerMatrix::identity(n);
  RationalMatrix mu;
  RationalVector b;
  detail::gram_schmidt(g, mu, b);
  if (n < 2) return {u, g};

  // b_k <- b_k - q b_j, on the Gram matrix, the transform and mu.
  auto reduce = [&](std::size_t k, std::size_t j, const Integer& q) {
    const Rational qq(q);
    for (std::size_t c = 0; c < n; ++c) u(k, c) -= q * u(j, c);
    Rational gkk = g(k, k) - 2 * qq * g(k, j) + qq * qq * g(j, j);
    for (std::size_t c = 0; c < n; ++c) {
      if (c == k) continue;
      g(k, c) -= qq * g(j, c);
      g(c, k) = g(k, c);
    }
    g(k, k) = gkk;
    for (std::size_t i = 0; i < j; ++i) mu(k, i) -= qq * mu(j, i);
    mu(k, j) -= qq;
  };

  std::size_t k = 1;
  while (k < n) {
    for (std::size_t j = k; j-- > 0;) {
      Integer q = round_of(mu(k, j));
      if (q != 0) reduce(k, j, q);
    }
    const Rational muk = mu(k, k - 1);
    if (b[k] >= (kLovaszDelta - muk * muk) * b[k - 1]) {
      ++k;
      continue;
    }
    // Swap b_{k-1} and b_k.
    u.swap_rows(k, k - 1);
    g.swap_rows(k, k - 1);
    for (std::size_t r = 0; r < n; ++r) std::swap(g(r, k), g(r, k - 1));
    Rational bnew = b[k] + muk * muk * b[k - 1];
    mu(k, k - 1) = muk * b[k - 1] / bnew;
    b[k] = b[k - 1] * b[k] / bnew;
    b[k - 1] = bnew;
    for (std::size_t j = 0; j + 1 < k; ++j) std::swap(mu(k - 1, j), mu(k, j));
    for (std::size_t i = k + 1; i < n; ++i) {
      Rational t = mu(i, k);
      mu(i, k) = mu(i, k - 1) - muk * t;
      mu(i, k - 1) = t + mu(k, k - 1) * mu(i, k);
    }
    if (k > 1) --k;
  }
  return {std::move(u), std::move(g)};
}

}  // namespace cyclopack
