#pragma once

// Rational interval enclosures of real constants. Endpoints are exact
// rationals; results are rounded outward to dyadic numbers with a fixed
// number of fractional bits so sizes stay bounded.

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "cyclopack/rational.hpp"

namespace cyclopack {

inline constexpr unsigned kDefaultPrecisionBits = 128;

class IntervalValue {
 public:
  IntervalValue() = default;
  explicit IntervalValue(const Rational& exact) : lo_(exact), hi_(exact) {}
  IntervalValue(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_ > hi_) throw std::invalid_argument("interval with lo > hi");
  }

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  Rational width() const { return hi_ - lo_; }
  Rational midpoint() const { return (lo_ + hi_) / 2; }
  bool contains(const Rational& q) const { return lo_ <= q && q <= hi_; }
  bool contains(const IntervalValue& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool is_nonnegative() const { return sgn(lo_) >= 0; }
  double approx() const { return midpoint().get_d(); }

  /// Outward rounding to k/2^bits endpoints.
  IntervalValue rounded(unsigned bits) const {
    return {round_down_dyadic(lo_, bits), round_up_dyadic(hi_, bits)};
  }

  friend IntervalValue operator+(const IntervalValue& a, const IntervalValue& b) {
    return {a.lo_ + b.lo_, a.hi_ + b.hi_};
  }
  friend IntervalValue operator-(const IntervalValue& a, const IntervalValue& b) {
    return {a.lo_ - b.hi_, a.hi_ - b.lo_};
  }
  friend IntervalValue operator*(const IntervalValue& a, const IntervalValue& b) {
    Rational p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_, p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
  }
  friend IntervalValue operator*(const IntervalValue& a, const Rational& s) {
    if (sgn(s) >= 0) return {a.lo_ * s, a.hi_ * s};
    return {a.hi_ * s, a.lo_ * s};
  }
  friend IntervalValue operator*(const Rational& s, const IntervalValue& a) { return a * s; }
  friend IntervalValue operator/(const IntervalValue& a, const IntervalValue& b) {
    if (sgn(b.lo_) <= 0 && sgn(b.hi_) >= 0) throw std::domain_error("interval division by zero");
    return a * IntervalValue(1 / b.hi_, 1 / b.lo_);
  }
  friend IntervalValue operator/(const IntervalValue& a, const Rational& s) {
    if (s == 0) throw std::domain_error("interval division by zero");
    return a * Rational(1 / s);
  }

  /// Power of a nonnegative interval.
  IntervalValue pow(unsigned long n) const {
    if (!is_nonnegative()) throw std::domain_error("pow of an interval with negative part");
    return {pow_rational(lo_, n), pow_rational(hi_, n)};
  }

  friend std::string to_string(const IntervalValue& v) {
    return "[" + to_fraction_string(v.lo_) + ", " + to_fraction_string(v.hi_) + "]";
  }

 private:
  Rational lo_ = 0;
  Rational hi_ = 0;
};

namespace detail {

// arctan(1/k) by its alternating series; the tail is bounded by the first
// omitted term, which is below 2^-(bits+4).
inline IntervalValue arctan_inverse(unsigned long k, unsigned bits) {
  const Rational tolerance = dyadic(1, bits + 4);
  Integer k2 = Integer(k) * Integer(k);
  Integer power = k;  // k^(2n+1)
  Rational sum = 0;
  for (unsigned long n = 0;; ++n) {
    Rational term(1, power * Integer(2 * n + 1));
    term.canonicalize();
    if (term < tolerance) return {sum - term, sum + term};
    if (n % 2 == 0) sum += term;
    else sum -= term;
    power *= k2;
  }
}

}  // namespace detail

/// Enclosure of pi via Machin's formula pi = 16 atan(1/5) - 4 atan(1/239),
/// rounded outward to `bits` fractional bits.
inline IntervalValue pi_interval(unsigned bits) {
  static std::mutex mutex;
  static std::map<unsigned, IntervalValue> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(bits); it != cache.end()) return it->second;
  const unsigned work = bits + 8;
  IntervalValue pi = detail::arctan_inverse(5, work) * Rational(16) - detail::arctan_inverse(239, work) * Rational(4);
  pi = pi.rounded(bits);
  cache.emplace(bits, pi);
  return pi;
}

/// Enclosure of v^(1/n), v >= 0, endpoints k/2^bits.
inline IntervalValue nth_root_interval(const IntervalValue& v, unsigned long n, unsigned bits) {
  if (!v.is_nonnegative()) throw std::domain_error("root of an interval with negative part");
  if (n == 0) throw std::invalid_argument("zeroth root");
  // floor(root(floor(lo * 2^(n bits)))) / 2^bits <= lo^(1/n), similarly upward for hi.
  Rational lo_scaled = v.lo(), hi_scaled = v.hi();
  mpq_mul_2exp(lo_scaled.get_mpq_t(), lo_scaled.get_mpq_t(), n * bits);
  mpq_mul_2exp(hi_scaled.get_mpq_t(), hi_scaled.get_mpq_t(), n * bits);
  Integer lo_int = floor_of(lo_scaled), hi_int = ceil_of(hi_scaled);
  Integer lo_root, hi_root;
  mpz_root(lo_root.get_mpz_t(), lo_int.get_mpz_t(), n);
  if (mpz_root(hi_root.get_mpz_t(), hi_int.get_mpz_t(), n) == 0) hi_root += 1;
  return {dyadic(lo_root, bits), dyadic(hi_root, bits)};
}

/// Enclosure of sqrt of a nonnegative interval at `bits` fractional bits.
inline IntervalValue sqrt_interval(const IntervalValue& v, unsigned bits) {
  return nth_root_interval(v, 2, bits);
}

/// Volume of the unit ball in R^n: pi^(n/2) / (n/2)!. For odd n this is
/// pi^((n-1)/2) 2^((n+1)/2) / n!!, which needs no square root of pi.
inline IntervalValue ball_volume(unsigned long n, unsigned bits = kDefaultPrecisionBits) {
  if (n == 0) return IntervalValue(Rational(1));
  const unsigned work = bits + 16 + static_cast<unsigned>(4 * n);
  IntervalValue pi = pi_interval(work);
  IntervalValue v;
  if (n % 2 == 0) {
    v = pi.pow(n / 2) / Rational(factorial(n / 2));
  } else {
    Integer double_fact;
    mpz_2fac_ui(double_fact.get_mpz_t(), n);
    Integer two_pow = 1;
    two_pow <<= (n + 1) / 2;
    Rational ratio(two_pow, double_fact);
    ratio.canonicalize();
    v = pi.pow((n - 1) / 2) * ratio;
  }
  return v.rounded(bits);
}

}  // namespace cyclopack
