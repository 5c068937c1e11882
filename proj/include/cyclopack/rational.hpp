#pragma once

// Exact rational helpers on top of GMP.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cyclopack {

using Rational = mpq_class;
using Integer = mpz_class;

using RationalVector = std::vector<Rational>;
using IntegerVector = std::vector<Integer>;

/// Thrown for inputs outside an operation's domain (m < 3, r^2 <= 0, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Integer ceil_of(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

// Nearest integer; exact halves go toward zero.
inline Integer round_of(const Rational& q) {
  if (sgn(q) >= 0) return ceil_of(q - Rational(1, 2));
  return floor_of(q + Rational(1, 2));
}

/// Canonical "p/q" text with q > 0, always including the denominator.
inline std::string to_fraction_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

/// Parses "p/q", "p" or "-p/q". Rejects q = 0 and trailing garbage.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw DomainError("empty rational");
  auto valid_int = [](const std::string& t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  auto slash = s.find('/');
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!num.empty() && num[0] == '+') num = num.substr(1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
    throw DomainError("malformed rational: " + s);
  Integer n(num, 10), d(den, 10);
  if (d == 0) throw DomainError("zero denominator: " + s);
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline Rational pow_rational(const Rational& base, unsigned long exponent) {
  Integer n, d;
  mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), exponent);
  Rational r(n, d);
  r.canonicalize();
  return r;
}

inline Rational dyadic(const Integer& numerator, unsigned long bits) {
  Integer den = 1;
  den <<= bits;
  Rational r(numerator, den);
  r.canonicalize();
  return r;
}

/// Largest k/2^bits <= q.
inline Rational round_down_dyadic(const Rational& q, unsigned long bits) {
  Rational scaled = q;
  mpq_mul_2exp(scaled.get_mpq_t(), scaled.get_mpq_t(), bits);
  return dyadic(floor_of(scaled), bits);
}

/// Smallest k/2^bits >= q.
inline Rational round_up_dyadic(const Rational& q, unsigned long bits) {
  Rational scaled = q;
  mpq_mul_2exp(scaled.get_mpq_t(), scaled.get_mpq_t(), bits);
  return dyadic(ceil_of(scaled), bits);
}

inline Integer factorial(unsigned long n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

}  // namespace cyclopack
