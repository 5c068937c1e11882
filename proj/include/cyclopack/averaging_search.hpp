#pragma once

// Averaging search for a principally polarized lattice Gamma(r0^2, x0) whose
// injectivity volume certifiably exceeds (m - eps) / 4^g.
//
// chi(z) = 1 iff v_{2g} |z|^{2g} <= m - eps. A radius r0 is taken from a
// grid so that the b = 0 part of the lattice is already long enough and the
// average count J(r0) stays below m; then rational points x of the
// fundamental parallelepiped of the codifferent are tried until the count
// N(x) of short lattice vectors with b != 0 vanishes.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cyclopack/cyclotomic.hpp"
#include "cyclopack/enumeration.hpp"
#include "cyclopack/interval.hpp"
#include "cyclopack/polarized_lattice.hpp"
#include "cyclopack/random.hpp"
#include "cyclopack/trace_geometry.hpp"

namespace cyclopack {

/// Decides chi on exact squared norms. Precomputes the threshold
/// ((m - eps) / v_{2g}) for |z|^{2g} and rational bounds on the squared radius.
class ChiRegion {
 public:
  ChiRegion(unsigned long m, Rational epsilon, std::size_t g, unsigned bits = kDefaultPrecisionBits)
      : m_(m), epsilon_(std::move(epsilon)), g_(g), bits_(bits) {
    if (sgn(epsilon_) <= 0 || epsilon_ >= Rational(m)) throw DomainError("epsilon must satisfy 0 < eps < m");
    threshold_ = threshold_at(bits_);
    radius_sq_ = nth_root_interval(threshold_, g_, bits_);
  }

  /// Enclosure of R^2 = ((m - eps) / v_{2g})^{1/g}.
  const IntervalValue& radius_sq() const { return radius_sq_; }
  /// Every point with chi = 1 has squared norm at most this.
  const Rational& radius_sq_upper() const { return radius_sq_.hi(); }
  unsigned precision() const { return bits_; }

  /// v_{2g} q^g <= m - eps. Undecided ties at the refinement limit count as inside.
  bool inside(const Rational& q) const {
    if (sgn(q) <= 0) return true;
    if (q > radius_sq_.hi()) return false;
    if (q < radius_sq_.lo()) return true;
    const Rational p = pow_rational(q, g_);
    IntervalValue t = threshold_;
    for (unsigned bits = bits_;;) {
      if (p <= t.lo()) return true;
      if (p > t.hi()) return false;
      bits *= 2;
      if (bits > kMaxBits) return true;
      t = threshold_at(bits);
    }
  }

 private:
  static constexpr unsigned kMaxBits = 8192;

  IntervalValue threshold_at(unsigned bits) const {
    IntervalValue vol = ball_volume(2 * g_, bits + 16);
    return (IntervalValue(Rational(m_) - epsilon_) / vol).rounded(bits);
  }

  unsigned long m_;
  Rational epsilon_;
  std::size_t g_;
  unsigned bits_;
  IntervalValue threshold_;
  IntervalValue radius_sq_;
};

inline bool chi(const CyclotomicContext& ctx, const PointEZ& p, unsigned long m, const Rational& epsilon,
                unsigned bits = kDefaultPrecisionBits) {
  return ChiRegion(m, epsilon, ctx.degree(), bits).inside(norm_sq(ctx, p));
}

namespace detail {

struct ShortElement {
  CycloElement b;
  CycloElement b_conj;
  Rational norm_sq;  // Tr(b conj b)
};

// Nonzero b in O_K with Tr(b conj b) <= bound.
inline std::vector<ShortElement> short_integers(const CyclotomicContext& ctx, const BallEnumerator& ok_enum,
                                                const Rational& bound) {
  std::vector<ShortElement> out;
  RationalVector zero(ctx.degree(), 0);
  ok_enum.for_each(zero, bound, [&](const IntegerVector& v, const Rational& q) {
    if (sgn(q) == 0) return;
    CycloElement b = ctx.zero();
    for (std::size_t i = 0; i < v.size(); ++i) b.coords[i] = Rational(v[i]);
    CycloElement bc = ctx.conj(b);
    out.push_back({std::move(b), std::move(bc), q});
  });
  return out;
}

}  // namespace detail

/// Enclosure of J(r) = nu(F') r^{-g} sum_{b != 0} int_E chi(x + i b / r) dnu(x)
///                  = sqrt|disc| r^{-g} v_g sum_{b != 0} (R^2 - |b|^2 / r^2)_+^{g/2}.
inline IntervalValue j_value(const CyclotomicContext& ctx, const Rational& r_sq, unsigned long m,
                             const Rational& epsilon, unsigned bits = kDefaultPrecisionBits) {
  if (sgn(r_sq) <= 0) throw DomainError("r^2 must be positive");
  const std::size_t g = ctx.degree();
  if (g % 2 == 1) throw std::logic_error("j_value: odd degree");
  const unsigned work = bits + 32;
  ChiRegion region(m, epsilon, g, work);
  const IntervalValue& rr = region.radius_sq();
  BallEnumerator ok_enum(gram(ctx, ctx.ok_basis()));
  auto shorts = detail::short_integers(ctx, ok_enum, r_sq * rr.hi());
  const unsigned long half = g / 2;
  IntervalValue sum(Rational(0));
  for (const auto& s : shorts) {
    Rational t = s.norm_sq / r_sq;
    if (t < rr.lo()) sum = sum + IntervalValue(pow_rational(rr.lo() - t, half), pow_rational(rr.hi() - t, half));
    else if (t <= rr.hi()) sum = sum + IntervalValue(Rational(0), pow_rational(rr.hi() - t, half));
  }
  IntervalValue covol = sqrt_interval(IntervalValue(Rational(ctx.disc_abs())), work);
  IntervalValue j = covol * ball_volume(g, work) * sum / pow_rational(r_sq, half);
  return j.rounded(bits);
}

/// r^2 in {k/2 : 1 <= k <= 32}, increasing.
inline std::vector<Rational> default_r_grid() {
  std::vector<Rational> grid;
  for (long k = 1; k <= 32; ++k) grid.push_back(make_rational(k, 2));
  return grid;
}

/// Exact lambda_1^2 of the codifferent under the trace form.
inline Rational codifferent_minimum(const CyclotomicContext& ctx) {
  return shortest_norm_sq(gram(ctx, ctx.codiff_basis()));
}

struct RadiusChoice {
  Rational r_sq;
  IntervalValue j;
};

/// First grid value with v_{2g} (r^2 lambda_1(I)^2)^g > m - eps and J(r) < m,
/// both decided on interval bounds.
inline std::optional<RadiusChoice> select_r(const CyclotomicContext& ctx, unsigned long m, const Rational& epsilon,
                                            const std::vector<Rational>& r_grid,
                                            unsigned bits = kDefaultPrecisionBits) {
  if (r_grid.empty()) throw DomainError("select_r: empty grid");
  const std::size_t g = ctx.degree();
  const Rational lambda_i = codifferent_minimum(ctx);
  const IntervalValue vol = ball_volume(2 * g, bits);
  const Rational target = Rational(m) - epsilon;
  for (const auto& r_sq : r_grid) {
    if (sgn(r_sq) <= 0) throw DomainError("select_r: grid values must be positive");
    if (!(vol.lo() * pow_rational(r_sq * lambda_i, g) > target)) continue;
    IntervalValue j = j_value(ctx, r_sq, m, epsilon, bits);
    if (j.hi() < Rational(m)) return RadiusChoice{r_sq, j};
  }
  return std::nullopt;
}

/// Exact N(x) for a fixed (r^2, m, eps): the number of lattice vectors
/// r a + r x conj(b) + (i/r) b with b != 0, a in I and chi = 1.
class NCounter {
 public:
  NCounter(ContextPtr ctx, Rational r_sq, unsigned long m, const Rational& epsilon,
           unsigned bits = kDefaultPrecisionBits)
      : ctx_(std::move(ctx)),
        r_sq_(std::move(r_sq)),
        region_(m, epsilon, ctx_->degree(), bits),
        codiff_enum_(gram(*ctx_, ctx_->codiff_basis())) {
    if (sgn(r_sq_) <= 0) throw DomainError("r^2 must be positive");
    BallEnumerator ok_enum(gram(*ctx_, ctx_->ok_basis()));
    shorts_ = detail::short_integers(*ctx_, ok_enum, r_sq_ * region_.radius_sq_upper());
  }

  const ChiRegion& region() const { return region_; }
  const Rational& r_sq() const { return r_sq_; }

  long count(const CycloElement& x) const {
    const CyclotomicContext& c = *ctx_;
    const Rational& r_max = region_.radius_sq_upper();
    long n = 0;
    for (const auto& s : shorts_) {
      const Rational b_part = s.norm_sq / r_sq_;
      if (b_part > r_max) continue;
      RationalVector center = c.codiff_coordinates(c.mul(x, s.b_conj));
      for (auto& q : center) q = -q;
      const Rational a_radius = (r_max - b_part) / r_sq_;
      codiff_enum_.for_each(center, a_radius, [&](const IntegerVector&, const Rational& q) {
        if (region_.inside(r_sq_ * q + b_part)) ++n;
      });
    }
    return n;
  }

 private:
  ContextPtr ctx_;
  Rational r_sq_;
  ChiRegion region_;
  BallEnumerator codiff_enum_;
  std::vector<detail::ShortElement> shorts_;
};

inline long count_N(ContextPtr ctx, const Rational& r_sq, const CycloElement& x, unsigned long m,
                    const Rational& epsilon, unsigned bits = kDefaultPrecisionBits) {
  return NCounter(std::move(ctx), r_sq, m, epsilon, bits).count(x);
}

/// x = sum_j (u_j / denom) codiff_basis[j], u_j uniform in [0, denom).
inline CycloElement sample_x(const CyclotomicContext& ctx, unsigned long denom, Rng& rng) {
  if (denom == 0) throw DomainError("sample_x: denominator must be positive");
  CycloElement x = ctx.zero();
  for (const auto& a : ctx.codiff_basis()) {
    Rational coeff(static_cast<unsigned long>(uniform_below(rng, denom)), denom);
    coeff.canonicalize();
    if (coeff != 0) x += coeff * a;
  }
  return x;
}

struct SearchConfig {
  unsigned long m = 3;
  Rational epsilon{1, 2};
  unsigned long denom = 8;
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
  unsigned precision = kDefaultPrecisionBits;
  std::vector<Rational> r_grid = default_r_grid();
  /// 0 picks hardware concurrency.
  unsigned workers = 0;
};

struct CertificateChecks {
  bool integrality = false;
  bool unimodular = false;
  bool g_stable = false;
  bool real_mult = false;
  bool covolume_one = false;

  bool all() const { return integrality && unimodular && g_stable && real_mult && covolume_one; }
  friend bool operator==(const CertificateChecks&, const CertificateChecks&) = default;
};

struct Certificate {
  unsigned long m = 0;
  std::size_t g = 0;
  Rational epsilon;
  Rational r_sq;
  RationalVector x;
  Rational lambda1_sq;
  long n_value = 0;
  /// Rational lower bound for 4^g V(A; L) = v_{2g} lambda_1^{2g}.
  Rational bound_lo;
  CertificateChecks checks;
  unsigned precision_bits = kDefaultPrecisionBits;
  std::uint64_t seed = 0;
  std::size_t sample_index = 0;

  bool valid() const { return checks.all() && bound_lo > Rational(m) - epsilon; }
};

/// Builds Gamma(r^2, x) and evaluates everything a certificate asserts.
inline Certificate make_certificate(ContextPtr ctx, const Rational& epsilon, const Rational& r_sq,
                                    const CycloElement& x, unsigned bits) {
  const CyclotomicContext& c = *ctx;
  Certificate cert;
  cert.m = c.m();
  cert.g = c.degree();
  cert.epsilon = epsilon;
  cert.r_sq = r_sq;
  cert.x = x.coords;
  cert.precision_bits = bits;
  PolarizedLattice lat = build_lattice(ctx, r_sq, x);
  cert.checks.integrality = check_riemann_integrality(lat);
  cert.checks.unimodular = cert.checks.integrality && check_unimodular(lat);
  cert.checks.g_stable = check_g_stability(lat);
  cert.checks.real_mult = check_real_multiplication(lat);
  cert.checks.covolume_one = determinant(lat.real_gram) == 1;
  cert.lambda1_sq = shortest_norm_sq(lat.real_gram);
  cert.n_value = NCounter(ctx, r_sq, c.m(), epsilon, bits).count(x);
  IntervalValue four_g_volume = ball_volume(2 * c.degree(), bits + 16) * pow_rational(cert.lambda1_sq, c.degree());
  cert.bound_lo = round_down_dyadic(four_g_volume.lo(), bits);
  return cert;
}

struct SearchOutcome {
  enum class Status { certified, invalid_certificate, no_radius, budget_exhausted };
  Status status = Status::budget_exhausted;
  std::optional<Certificate> certificate;
  std::optional<RadiusChoice> radius;
  std::optional<long> best_n;
  std::size_t samples_tried = 0;
};

/// Candidate 0 is x = 0 (a corner of the fundamental parallelepiped); candidate
/// i >= 1 is the i-th draw of sample_x from a generator seeded with `seed`.
/// The first index with N(x) = 0 wins regardless of the worker count.
inline SearchOutcome search(const SearchConfig& config) {
  if (config.m < 3) throw DomainError("m must be at least 3");
  if (sgn(config.epsilon) <= 0 || config.epsilon >= Rational(config.m))
    throw DomainError("epsilon must satisfy 0 < eps < m");
  if (config.denom == 0) throw DomainError("denominator bound must be positive");
  ContextPtr ctx = make_context(config.m);
  SearchOutcome out;
  out.radius = select_r(*ctx, config.m, config.epsilon, config.r_grid, config.precision);
  if (!out.radius) {
    out.status = SearchOutcome::Status::no_radius;
    return out;
  }
  const Rational r_sq = out.radius->r_sq;
  const NCounter counter(ctx, r_sq, config.m, config.epsilon, config.precision);

  unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  Rng rng(config.seed);
  const std::size_t batch = std::max<std::size_t>(16, 4 * workers);
  std::size_t next_index = 0;
  while (next_index < config.budget) {
    const std::size_t count = std::min(batch, config.budget - next_index);
    std::vector<CycloElement> xs;
    xs.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      xs.push_back(next_index + i == 0 ? ctx->zero() : sample_x(*ctx, config.denom, rng));
    std::vector<long> ns(count, -1);
    if (workers == 1) {
      for (std::size_t i = 0; i < count; ++i) ns[i] = counter.count(xs[i]);
    } else {
      std::vector<std::future<void>> jobs;
      for (unsigned w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
          for (std::size_t i = w; i < count; i += workers) ns[i] = counter.count(xs[i]);
        }));
      for (auto& j : jobs) j.get();
    }
    for (std::size_t i = 0; i < count; ++i) {
      ++out.samples_tried;
      if (!out.best_n || ns[i] < *out.best_n) out.best_n = ns[i];
      if (ns[i] != 0) continue;
      Certificate cert = make_certificate(ctx, config.epsilon, r_sq, xs[i], config.precision);
      cert.seed = config.seed;
      cert.sample_index = next_index + i;
      out.status = cert.valid() ? SearchOutcome::Status::certified : SearchOutcome::Status::invalid_certificate;
      out.certificate = std::move(cert);
      return out;
    }
    next_index += count;
  }
  out.status = SearchOutcome::Status::budget_exhausted;
  return out;
}

inline nlohmann::json to_json(const Certificate& c) {
  nlohmann::json j;
  j["m"] = c.m;
  j["g"] = c.g;
  j["epsilon"] = to_fraction_string(c.epsilon);
  j["r_sq"] = to_fraction_string(c.r_sq);
  j["x"] = rational_vector_json(c.x);
  j["lambda1_sq"] = to_fraction_string(c.lambda1_sq);
  j["n_value"] = c.n_value;
  j["bound_lo"] = to_fraction_string(c.bound_lo);
  j["checks"] = {{"integrality", c.checks.integrality},
                 {"unimodular", c.checks.unimodular},
                 {"g_stable", c.checks.g_stable},
                 {"real_mult", c.checks.real_mult},
                 {"covolume_one", c.checks.covolume_one}};
  j["precision_bits"] = c.precision_bits;
  j["seed"] = c.seed;
  j["sample_index"] = c.sample_index;
  return j;
}

/// Parses a certificate document. Throws DomainError on any schema violation.
inline Certificate certificate_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> DomainError { return DomainError("malformed certificate: " + what); };
  if (!j.is_object()) throw fail("not an object");
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw fail(std::string("missing ") + key);
    return j.at(key);
  };
  auto rational = [&](const char* key) {
    const auto& v = need(key);
    if (!v.is_string()) throw fail(std::string(key) + " is not a string");
    return parse_rational(v.get<std::string>());
  };
  auto unsigned_int = [&](const char* key) {
    const auto& v = need(key);
    if (!v.is_number_unsigned()) throw fail(std::string(key) + " is not a nonnegative integer");
    return v.get<std::uint64_t>();
  };
  Certificate c;
  c.m = unsigned_int("m");
  c.g = unsigned_int("g");
  c.epsilon = rational("epsilon");
  c.r_sq = rational("r_sq");
  const auto& xs = need("x");
  if (!xs.is_array()) throw fail("x is not an array");
  for (const auto& v : xs) {
    if (!v.is_string()) throw fail("x entry is not a string");
    c.x.push_back(parse_rational(v.get<std::string>()));
  }
  c.lambda1_sq = rational("lambda1_sq");
  const auto& n = need("n_value");
  if (!n.is_number_integer()) throw fail("n_value is not an integer");
  c.n_value = n.get<long>();
  c.bound_lo = rational("bound_lo");
  const auto& checks = need("checks");
  if (!checks.is_object()) throw fail("checks is not an object");
  auto flag = [&](const char* key, bool required) {
    if (!checks.contains(key)) {
      if (required) throw fail(std::string("missing check ") + key);
      return false;
    }
    if (!checks.at(key).is_boolean()) throw fail(std::string("check ") + key + " is not a boolean");
    return checks.at(key).get<bool>();
  };
  c.checks.integrality = flag("integrality", true);
  c.checks.unimodular = flag("unimodular", true);
  c.checks.g_stable = flag("g_stable", true);
  c.checks.real_mult = flag("real_mult", true);
  c.checks.covolume_one = flag("covolume_one", false);
  c.precision_bits = static_cast<unsigned>(unsigned_int("precision_bits"));
  if (c.precision_bits < 16 || c.precision_bits > 1u << 16) throw fail("precision_bits out of range");
  if (j.contains("seed")) c.seed = unsigned_int("seed");
  if (j.contains("sample_index")) c.sample_index = unsigned_int("sample_index");
  return c;
}

struct CertifyResult {
  enum class Status { reproduced, mismatch, invalid };
  Status status = Status::mismatch;
  std::vector<std::string> mismatches;
};

/// Recomputes every derived field from (m, eps, r^2, x) and compares.
inline CertifyResult recertify(const Certificate& stored) {
  if (stored.m < 3) throw DomainError("certificate has m < 3");
  if (sgn(stored.epsilon) <= 0 || stored.epsilon >= Rational(stored.m)) throw DomainError("certificate epsilon out of range");
  if (sgn(stored.r_sq) <= 0) throw DomainError("certificate r_sq must be positive");
  ContextPtr ctx = make_context(stored.m);
  if (stored.x.size() != ctx->degree()) throw DomainError("certificate x has the wrong length");
  Certificate fresh = make_certificate(ctx, stored.epsilon, stored.r_sq, CycloElement(stored.x), stored.precision_bits);
  CertifyResult res;
  auto compare = [&](const std::string& field, const std::string& a, const std::string& b) {
    if (a != b) res.mismatches.push_back(field + ": stored " + a + ", recomputed " + b);
  };
  compare("g", std::to_string(stored.g), std::to_string(fresh.g));
  compare("lambda1_sq", to_fraction_string(stored.lambda1_sq), to_fraction_string(fresh.lambda1_sq));
  compare("n_value", std::to_string(stored.n_value), std::to_string(fresh.n_value));
  compare("bound_lo", to_fraction_string(stored.bound_lo), to_fraction_string(fresh.bound_lo));
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  compare("checks.integrality", b(stored.checks.integrality), b(fresh.checks.integrality));
  compare("checks.unimodular", b(stored.checks.unimodular), b(fresh.checks.unimodular));
  compare("checks.g_stable", b(stored.checks.g_stable), b(fresh.checks.g_stable));
  compare("checks.real_mult", b(stored.checks.real_mult), b(fresh.checks.real_mult));
  if (!res.mismatches.empty()) {
    res.status = CertifyResult::Status::mismatch;
    return res;
  }
  res.status = fresh.valid() ? CertifyResult::Status::reproduced : CertifyResult::Status::invalid;
  return res;
}

}  // namespace cyclopack
