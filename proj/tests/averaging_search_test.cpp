#include <cmath>
#include <complex>
#include <set>

#include <gtest/gtest.h>

#include "cyclopack/averaging_search.hpp"
#include "cyclopack/verification.hpp"
#include "oracles.hpp"

using namespace cyclopack;

namespace {

struct McEstimate {
  double mean;
  double std_error;
};

// Direct Monte-Carlo of sqrt|disc| r^{-g} sum_{b != 0} int_E chi(x + i b / r) dnu(x):
// x uniform in a coordinate cube around the ball, norms from floating embeddings.
McEstimate j_monte_carlo(unsigned long m, const Rational& r_sq_q, double eps, std::size_t samples,
                         std::uint64_t seed) {
  auto ctx = make_context(m);
  const std::size_t g = ctx->degree();
  const double r_sq = r_sq_q.get_d();
  const double v2g = std::pow(M_PI, static_cast<double>(g)) / std::tgamma(static_cast<double>(g) + 1);
  const double big_r_sq = std::pow((static_cast<double>(m) - eps) / v2g, 1.0 / static_cast<double>(g));

  RationalMatrix ok_gram = gram(*ctx, ctx->ok_basis());
  std::vector<double> b_parts;
  for (const auto& b : oracle::box_scan(ok_gram, RationalVector(g, 0), Rational(r_sq * big_r_sq) + 1)) {
    std::vector<double> c;
    bool zero = true;
    for (const auto& v : b) {
      c.push_back(v.get_d());
      zero = zero && v == 0;
    }
    if (zero) continue;
    double part = oracle::trace_norm_double(m, c) / r_sq;
    if (part <= big_r_sq) b_parts.push_back(part);
  }

  RationalMatrix inv = *inverse(ok_gram);
  double half = 0;
  for (std::size_t i = 0; i < g; ++i) half = std::max(half, std::sqrt(big_r_sq * inv(i, i).get_d()));
  half *= 1.001;
  const double sqrt_disc = std::sqrt(ctx->disc_abs().get_d());
  const double cube = std::pow(2 * half, static_cast<double>(g)) * sqrt_disc;
  const double scale = sqrt_disc * std::pow(r_sq, -static_cast<double>(g) / 2) * cube;

  std::vector<std::vector<std::complex<double>>> basis_emb(g);
  std::vector<unsigned long> units = ctx->units_mod_m();
  for (std::size_t j = 0; j < g; ++j) {
    std::vector<double> e(g, 0);
    e[j] = 1;
    for (unsigned long k : units) basis_emb[j].push_back(oracle::embed_double(m, k, e));
  }
  Rng rng(seed);
  double sum = 0, sum_sq = 0;
  std::vector<double> x(g);
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& c : x) c = (2 * uniform_unit(rng) - 1) * half;
    double norm = 0;
    for (std::size_t k = 0; k < units.size(); ++k) {
      std::complex<double> z = 0;
      for (std::size_t j = 0; j < g; ++j) z += x[j] * basis_emb[j][k];
      norm += std::norm(z);
    }
    double f = 0;
    for (double part : b_parts)
      if (norm + part <= big_r_sq) f += 1;
    sum += f;
    sum_sq += f * f;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  return {scale * mean, scale * std::sqrt(var / n)};
}

PointEZ real_point(const CyclotomicContext& ctx, const Rational& c) { return {ctx.from_rational(c), ctx.zero()}; }

}  // namespace

TEST(Chi, Examples) {
  auto ctx = make_context(4);
  const Rational eps(1, 2);
  EXPECT_TRUE(chi(*ctx, PointEZ{ctx->zero(), ctx->zero()}, 4, eps));
  EXPECT_FALSE(chi(*ctx, real_point(*ctx, 1), 4, eps));  // norm 2
  EXPECT_TRUE(chi(*ctx, real_point(*ctx, Rational(1, 2)), 4, eps));  // norm 1/2
}

TEST(Chi, RegionAgreesWithFloatingThreshold) {
  ChiRegion region(5, Rational(1, 2), 4);
  const double r_sq = std::pow(4.5 / (std::pow(M_PI, 4) / 24), 0.25);
  EXPECT_NEAR(region.radius_sq().midpoint().get_d(), r_sq, 1e-12);
  EXPECT_TRUE(region.inside(Rational(r_sq * 0.999999)));
  EXPECT_FALSE(region.inside(Rational(r_sq * 1.000001)));
  EXPECT_THROW(ChiRegion(5, Rational(6), 4), DomainError);
  EXPECT_THROW(ChiRegion(5, Rational(0), 4), DomainError);
}

TEST(JValue, EmptySumBelowShortestInteger) {
  auto ctx = make_context(4);
  IntervalValue j = j_value(*ctx, Rational(1, 100), 4, Rational(1, 2));
  EXPECT_EQ(j.lo(), 0);
  EXPECT_EQ(j.hi(), 0);
}

TEST(JValue, MatchesMonteCarloIntegral) {
  struct Case {
    unsigned long m;
    Rational r_sq;
  };
  for (const auto& c : {Case{4, 2}, Case{4, 5}, Case{3, 3}, Case{5, 4}}) {
    auto ctx = make_context(c.m);
    IntervalValue j = j_value(*ctx, c.r_sq, c.m, Rational(1, 2));
    McEstimate mc = j_monte_carlo(c.m, c.r_sq, 0.5, 1000000, 100 + c.m);
    const double widen = 3 * mc.std_error;
    EXPECT_GE(mc.mean, j.lo().get_d() - widen) << "m=" << c.m << " r_sq=" << c.r_sq;
    EXPECT_LE(mc.mean, j.hi().get_d() + widen) << "m=" << c.m << " r_sq=" << c.r_sq;
  }
}

TEST(JValue, ApproachesMMinusEpsilonForLargeRadius) {
  auto ctx = make_context(4);
  // The b = 0 slice is excluded, so the deficit decays like 1 / r^2.
  for (long r_sq : {32, 48, 64}) {
    IntervalValue j = j_value(*ctx, r_sq, 4, Rational(1, 2));
    EXPECT_LT(std::abs(j.midpoint().get_d() - 3.5), 0.05 * 3.5) << r_sq;
  }
  EXPECT_GT(std::abs(j_value(*ctx, 16, 4, Rational(1, 2)).midpoint().get_d() - 3.5),
            std::abs(j_value(*ctx, 64, 4, Rational(1, 2)).midpoint().get_d() - 3.5));
}

TEST(SelectR, Examples) {
  auto c4 = make_context(4);
  auto r4 = select_r(*c4, 4, Rational(1, 2), default_r_grid());
  ASSERT_TRUE(r4);
  EXPECT_EQ(r4->r_sq, 2);
  EXPECT_LT(r4->j.hi(), 4);
  auto c3 = make_context(3);
  EXPECT_EQ(codifferent_minimum(*c3), Rational(2, 3));
  EXPECT_EQ(codifferent_minimum(*c4), Rational(1, 2));
  auto r3 = select_r(*c3, 3, Rational(1, 2), default_r_grid());
  ASSERT_TRUE(r3);
  EXPECT_EQ(r3->r_sq, Rational(3, 2));
  EXPECT_FALSE(select_r(*c4, 4, Rational(1, 2), {Rational(1, 100)}));
}

TEST(CountN, ZeroAtOriginForGaussianIntegers) {
  auto ctx = make_context(4);
  EXPECT_EQ(count_N(ctx, 2, ctx->zero(), 4, Rational(1, 2)), 0);
}

TEST(CountN, DivisibleByConductor) {
  Rng rng(71);
  for (unsigned long m : {3ul, 4ul, 5ul, 8ul, 12ul}) {
    auto ctx = make_context(m);
    auto r = select_r(*ctx, m, Rational(1, 2), default_r_grid());
    ASSERT_TRUE(r);
    NCounter counter(ctx, r->r_sq, m, Rational(1, 2));
    // A larger radius too, so that nonzero counts actually occur.
    NCounter wide(ctx, 4 * r->r_sq, m, Rational(1, 2));
    long nonzero = 0;
    for (int t = 0; t < 100; ++t) {
      CycloElement x = random_element(*ctx, rng);
      EXPECT_EQ(counter.count(x) % static_cast<long>(m), 0);
      long w = wide.count(x);
      EXPECT_EQ(w % static_cast<long>(m), 0);
      nonzero += w != 0;
    }
    EXPECT_GT(nonzero, 0) << m;
  }
}

TEST(CountN, InvariantUnderCodifferentTranslation) {
  Rng rng(81);
  auto ctx = make_context(5);
  NCounter counter(ctx, 6, 5, Rational(1, 2));
  for (int t = 0; t < 20; ++t) {
    CycloElement x = random_element(*ctx, rng);
    CycloElement delta = ctx->zero();
    for (const auto& a : ctx->codiff_basis()) delta += Rational(uniform_between(rng, -2, 2)) * a;
    EXPECT_EQ(counter.count(x), counter.count(x + delta));
  }
}

TEST(CountN, MatchesLatticeBruteForce) {
  // N(x) counts lattice vectors with b != 0 inside the chi region.
  Rng rng(91);
  for (unsigned long m : {3ul, 4ul}) {
    auto ctx = make_context(m);
    const Rational r_sq = 3;
    for (int t = 0; t < 10; ++t) {
      CycloElement x = random_element(*ctx, rng);
      auto lat = build_lattice(ctx, r_sq, x);
      ChiRegion region(m, Rational(1, 2), ctx->degree());
      const std::size_t g = ctx->degree();
      long brute = 0;
      for (const auto& v : oracle::box_scan(lat.real_gram, RationalVector(2 * g, 0), region.radius_sq_upper())) {
        bool b_zero = true;
        for (std::size_t k = g; k < 2 * g; ++k) b_zero = b_zero && v[k] == 0;
        if (b_zero) continue;
        RationalVector q(v.begin(), v.end());
        if (region.inside(quadratic_form(lat.real_gram, q))) ++brute;
      }
      EXPECT_EQ(count_N(ctx, r_sq, x, m, Rational(1, 2)), brute);
    }
  }
}

TEST(SampleX, DomainAndDeterminism) {
  auto ctx = make_context(5);
  Rng one(1);
  for (int t = 0; t < 10; ++t) EXPECT_TRUE(sample_x(*ctx, 1, one).is_zero());
  Rng a(42), b(42);
  std::set<std::string> seen;
  for (int t = 0; t < 200; ++t) {
    CycloElement xa = sample_x(*ctx, 7, a), xb = sample_x(*ctx, 7, b);
    EXPECT_EQ(xa, xb);
    std::string key;
    for (const auto& c : ctx->codiff_coordinates(xa)) {
      EXPECT_GE(c, 0);
      EXPECT_LT(c, 1);
      EXPECT_TRUE(is_integer(c * 7));
      key += to_fraction_string(c) + ",";
    }
    seen.insert(key);
  }
  EXPECT_GT(seen.size(), 150u);
  EXPECT_THROW(sample_x(*ctx, 0, a), DomainError);
}

TEST(Search, GaussianWitnessInOneSample) {
  SearchConfig cfg;
  cfg.m = 4;
  cfg.budget = 1;
  SearchOutcome out = search(cfg);
  ASSERT_EQ(out.status, SearchOutcome::Status::certified);
  const Certificate& c = *out.certificate;
  EXPECT_EQ(c.r_sq, 2);
  EXPECT_EQ(c.x, RationalVector(2, 0));
  EXPECT_EQ(c.lambda1_sq, 1);
  EXPECT_GT(c.bound_lo, Rational(493, 100));
  EXPECT_LT(c.bound_lo, Rational(494, 100));
  EXPECT_TRUE(c.valid());
}

TEST(Search, EisensteinWitness) {
  SearchConfig cfg;
  cfg.m = 3;
  SearchOutcome out = search(cfg);
  ASSERT_EQ(out.status, SearchOutcome::Status::certified);
  EXPECT_EQ(out.certificate->r_sq, Rational(3, 2));
  EXPECT_EQ(out.certificate->lambda1_sq, 1);
  EXPECT_GT(out.certificate->bound_lo, 3);
}

TEST(Search, ConductorTwelve) {
  SearchConfig cfg;
  cfg.m = 12;
  cfg.budget = 10000;
  SearchOutcome out = search(cfg);
  ASSERT_EQ(out.status, SearchOutcome::Status::certified);
  EXPECT_GT(out.certificate->bound_lo, Rational(23, 2));
  EXPECT_EQ(out.certificate->n_value, 0);
}

TEST(Search, WorkerCountDoesNotChangeResult) {
  for (unsigned long m : {6ul, 8ul, 12ul}) {
    SearchConfig cfg;
    cfg.m = m;
    cfg.seed = 7;
    cfg.workers = 1;
    auto serial = search(cfg);
    cfg.workers = 4;
    auto parallel = search(cfg);
    ASSERT_TRUE(serial.certificate && parallel.certificate);
    EXPECT_EQ(to_json(*serial.certificate).dump(), to_json(*parallel.certificate).dump());
  }
}

TEST(Search, FailureModes) {
  SearchConfig cfg;
  cfg.m = 6;
  cfg.budget = 1;
  auto exhausted = search(cfg);
  EXPECT_EQ(exhausted.status, SearchOutcome::Status::budget_exhausted);
  ASSERT_TRUE(exhausted.best_n);
  EXPECT_GT(*exhausted.best_n, 0);
  EXPECT_EQ(*exhausted.best_n % 6, 0);

  cfg.r_grid = {Rational(1, 100)};
  EXPECT_EQ(search(cfg).status, SearchOutcome::Status::no_radius);

  cfg.m = 5;
  cfg.epsilon = 6;
  EXPECT_THROW(search(cfg), DomainError);
}

TEST(CertificateJson, RoundTripAndRecertify) {
  SearchConfig cfg;
  cfg.m = 8;
  auto out = search(cfg);
  ASSERT_TRUE(out.certificate);
  nlohmann::json j = to_json(*out.certificate);
  for (const char* key : {"epsilon", "r_sq", "lambda1_sq", "bound_lo"}) EXPECT_TRUE(j[key].is_string()) << key;
  Certificate back = certificate_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_EQ(recertify(back).status, CertifyResult::Status::reproduced);

  Certificate tampered = back;
  tampered.lambda1_sq *= 2;
  EXPECT_EQ(recertify(tampered).status, CertifyResult::Status::mismatch);

  nlohmann::json broken = j;
  broken.erase("r_sq");
  EXPECT_THROW(certificate_from_json(broken), DomainError);
  broken = j;
  broken["x"] = nlohmann::json::array({"1/2"});
  EXPECT_THROW(recertify(certificate_from_json(broken)), DomainError);
}

TEST(Verification, SuitesPass) {
  for (auto [m, trials] : {std::pair{4ul, 100u}, std::pair{12ul, 25u}, std::pair{7ul, 20u}}) {
    for (const auto& s : run_verification(m, trials, 3)) {
      EXPECT_FALSE(s.failure) << s.name << ": " << s.failure.value_or("");
      EXPECT_GT(s.cases, 0u);
    }
  }
}
