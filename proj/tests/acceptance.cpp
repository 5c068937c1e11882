// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cyclopack/cli.hpp"
#include "cyclopack/cyclopack.hpp"
#include "oracles.hpp"

using namespace cyclopack;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

Rational random_r_sq(Rng& rng) {
  for (;;) {
    Rational q = make_rational(uniform_between(rng, 1, 32), uniform_between(rng, 1, 8));
    if (q >= Rational(1, 2) && q <= 4) return q;
  }
}

// Certificates emitted by criteria 1 and 2, replayed by criterion 10.
std::vector<std::string> g_certificates;

Verdict small_witnesses() {
  Verdict v;
  std::ostringstream summary;
  for (unsigned long m : {3ul, 4ul, 5ul, 6ul, 8ul, 10ul, 12ul}) {
    SearchConfig cfg;
    cfg.m = m;
    auto t0 = Clock::now();
    SearchOutcome out = search(cfg);
    double secs = seconds_since(t0);
    if (out.status != SearchOutcome::Status::certified) {
      v.fail("m=" + std::to_string(m) + " produced no valid certificate");
      continue;
    }
    const Certificate& c = *out.certificate;
    g_certificates.push_back(to_json(c).dump(2));
    summary << " m=" << m << ":" << fmt(c.bound_lo.get_d(), 3) << "(" << fmt(secs, 2) << "s)";
    if (!(c.bound_lo > Rational(m) - Rational(1, 2))) v.fail("m=" + std::to_string(m) + " bound too small");
    if (secs >= 60) v.fail("m=" + std::to_string(m) + " took " + fmt(secs, 1) + " s");
    if (m == 4) {
      if (c.r_sq != 2) v.fail("m=4 r_sq = " + to_fraction_string(c.r_sq));
      if (c.x != RationalVector(2, 0)) v.fail("m=4 x != 0");
      if (c.lambda1_sq != 1) v.fail("m=4 lambda1_sq = " + to_fraction_string(c.lambda1_sq));
      if (!(c.bound_lo > Rational(493, 100) && c.bound_lo < Rational(494, 100)))
        v.fail("m=4 bound_lo outside (4.93, 4.94)");
    }
  }
  if (v.pass) v.detail = "bound_lo" + summary.str();
  return v;
}

Verdict larger_witness() {
  Verdict v;
  std::ostringstream summary;
  bool any = false;
  for (unsigned long m : {18ul, 30ul}) {
    SearchConfig cfg;
    cfg.m = m;
    cfg.budget = 10000;
    auto t0 = Clock::now();
    SearchOutcome out = search(cfg);
    double secs = seconds_since(t0);
    if (out.status == SearchOutcome::Status::certified && out.certificate->bound_lo > Rational(m) - Rational(1, 2) &&
        secs < 1800) {
      any = true;
      g_certificates.push_back(to_json(*out.certificate).dump(2));
      summary << " m=" << m << ":" << fmt(out.certificate->bound_lo.get_d(), 3) << "(" << fmt(secs, 2) << "s)";
    } else {
      summary << " m=" << m << ":none(" << fmt(secs, 2) << "s)";
    }
  }
  if (!any) v.fail("neither m=18 nor m=30 certified;" + summary.str());
  else v.detail = "bound_lo" + summary.str();
  return v;
}

Verdict principality() {
  Verdict v;
  Rng rng(1001);
  for (int t = 0; t < 100; ++t) {
    unsigned long m = uniform_between(rng, 3, 12);
    auto ctx = make_context(m);
    Rational r_sq = random_r_sq(rng);
    CycloElement x = random_element(*ctx, rng);
    auto lat = build_lattice(ctx, r_sq, x);
    std::string inst = "m=" + std::to_string(m) + " r_sq=" + to_fraction_string(r_sq);
    if (!check_riemann_integrality(lat)) v.fail("non-integral symplectic at " + inst);
    else if (determinant(lat.symplectic) != 1) v.fail("det symplectic != 1 at " + inst);
    if (determinant(lat.real_gram) != 1) v.fail("det real_gram != 1 at " + inst);
  }
  if (v.pass) v.detail = "100 random instances, 0 failures";
  return v;
}

Verdict symmetry() {
  Verdict v;
  Rng rng(2002);
  std::size_t norm_cases = 0, lattice_cases = 0;
  for (unsigned long m = 3; m <= 12; ++m) {
    auto ctx = make_context(m);
    for (int t = 0; t < 100; ++t) {
      PointEZ z = random_point(*ctx, rng);
      Rational n0 = norm_sq(*ctx, z);
      for (unsigned long k = 0; k < m; ++k, ++norm_cases)
        if (norm_sq(*ctx, g_act(*ctx, GroupElement{k}, z)) != n0)
          v.fail("norm changed at m=" + std::to_string(m) + " k=" + std::to_string(k));
    }
    for (int t = 0; t < 100; ++t, ++lattice_cases) {
      auto lat = build_lattice(ctx, random_r_sq(rng), random_element(*ctx, rng));
      if (!check_g_stability(lat)) v.fail("not G-stable at m=" + std::to_string(m));
      if (!check_real_multiplication(lat)) v.fail("not stable under the real subring at m=" + std::to_string(m));
    }
  }
  if (v.pass)
    v.detail = std::to_string(norm_cases) + " norm cases, " + std::to_string(lattice_cases) + " lattices, 0 failures";
  return v;
}

Verdict divisibility() {
  Verdict v;
  Rng rng(3003);
  std::ostringstream summary;
  for (unsigned long m : {3ul, 4ul, 5ul, 8ul, 12ul}) {
    auto ctx = make_context(m);
    auto choice = select_r(*ctx, m, Rational(1, 2), default_r_grid());
    if (!choice) {
      v.fail("no radius for m=" + std::to_string(m));
      continue;
    }
    NCounter counter(ctx, choice->r_sq, m, Rational(1, 2));
    long max_n = 0;
    for (int t = 0; t < 100; ++t) {
      long n = counter.count(random_element(*ctx, rng));
      max_n = std::max(max_n, n);
      if (n % static_cast<long>(m) != 0) v.fail("N=" + std::to_string(n) + " at m=" + std::to_string(m));
    }
    summary << " m=" << m << "(r0^2=" << to_fraction_string(choice->r_sq) << ",max N=" << max_n << ")";
  }
  if (v.pass) v.detail = "0 failures;" + summary.str();
  return v;
}

// (a) Averaging over a translate: for m = 4, r = 1 the map x -> x b with b = 1 + i
// is checked on E = C with |w|^2_E = 2 |w|^2 and I = (1/2) Z[i].
bool lemma_check(std::string& detail) {
  auto ctx = make_context(4);
  const double big_r_sq = ChiRegion(4, Rational(1, 2), 2).radius_sq().midpoint().get_d();
  const std::complex<double> b(1, 1);
  const std::complex<double> zx(1.0 / 3, 1.0 / 5);
  const double zy_norm = 2.0 / 49;  // z_y = 1/7
  auto emb = [&](const CycloElement& e) {
    return std::complex<double>(e.coords[0].get_d(), e.coords[1].get_d());  // zeta -> i
  };
  const std::complex<double> e1 = emb(ctx->codiff_basis()[0]), e2 = emb(ctx->codiff_basis()[1]);
  const double cell = 2 * std::abs((std::conj(e1) * e2).imag());  // nu(F) in the trace metric
  const std::size_t samples = 1000000;
  Rng rng(4004);
  auto chi = [&](std::complex<double> w) { return 2 * std::norm(w) + zy_norm <= big_r_sq; };

  double sl = 0, sl2 = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    std::complex<double> x = uniform_unit(rng) * e1 + uniform_unit(rng) * e2;
    std::complex<double> w = x * b + zx;
    double f = 0;
    for (int p = -8; p <= 8; ++p)
      for (int q = -8; q <= 8; ++q)
        if (chi(static_cast<double>(p) * e1 + static_cast<double>(q) * e2 + w)) f += cell;
    sl += f;
    sl2 += f * f;
  }
  const double rho = std::sqrt((big_r_sq - zy_norm) / 2);
  const double box = 2 * (2 * rho) * (2 * rho);
  double sr = 0, sr2 = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    std::complex<double> x(-zx.real() + (2 * uniform_unit(rng) - 1) * rho, -zx.imag() + (2 * uniform_unit(rng) - 1) * rho);
    double f = chi(x + zx) ? box : 0;
    sr += f;
    sr2 += f * f;
  }
  const double n = static_cast<double>(samples);
  const double ml = sl / n, mr = sr / n;
  const double se = std::sqrt((sl2 / n - ml * ml) / n + (sr2 / n - mr * mr) / n);
  const double exact = M_PI * (big_r_sq - zy_norm);
  detail = "(a) lhs=" + fmt(ml) + " rhs=" + fmt(mr) + " disc=" + fmt(exact) + " 3se=" + fmt(3 * se);
  return std::abs(ml - mr) <= 3 * se;
}

// (b) Mean of N over sampled x against J(r).
bool mean_check(std::string& detail) {
  bool ok = true;
  detail = "(b)";
  for (unsigned long m : {3ul, 4ul, 5ul}) {
    auto ctx = make_context(m);
    const Rational r_sq = select_r(*ctx, m, Rational(1, 2), default_r_grid())->r_sq * 2;
    IntervalValue j = j_value(*ctx, r_sq, m, Rational(1, 2));
    NCounter counter(ctx, r_sq, m, Rational(1, 2));
    Rng rng(5005 + m);
    const std::size_t samples = 2000;
    double s = 0, s2 = 0;
    for (std::size_t t = 0; t < samples; ++t) {
      double n = static_cast<double>(counter.count(sample_x(*ctx, 1009, rng)));
      s += n;
      s2 += n * n;
    }
    const double mean = s / samples;
    const double se = std::sqrt((s2 / samples - mean * mean) / samples);
    const double jm = j.midpoint().get_d();
    const bool here = se > 0 && std::abs(mean - jm) <= 3 * se + j.width().get_d();
    ok = ok && here;
    detail += " m=" + std::to_string(m) + "(r^2=" + to_fraction_string(r_sq) + " mean=" + fmt(mean) +
              " J=" + fmt(jm) + " 3se=" + fmt(3 * se) + ")";
  }
  return ok;
}

// (c) J(r) -> m - eps for m = 4 along the half-integer grid, extended to
// r^2 <= 64 because the deficit from the excluded b = 0 slice decays like 1 / r^2.
bool limit_check(std::string& detail) {
  auto ctx = make_context(4);
  std::vector<Rational> grid;
  for (long k = 1; k <= 128; ++k) grid.push_back(make_rational(k, 2));
  std::vector<double> js;
  for (const auto& r : grid) js.push_back(j_value(*ctx, r, 4, Rational(1, 2)).midpoint().get_d());
  // Smallest grid index after which every value stays within 5%.
  std::size_t from = grid.size();
  for (std::size_t i = grid.size(); i-- > 0;) {
    if (std::abs(js[i] - 3.5) > 0.05 * 3.5) break;
    from = i;
  }
  if (from == grid.size()) {
    detail = "(c) no grid tail within 5% (J at r^2=" + to_fraction_string(grid.back()) + " is " + fmt(js.back()) + ")";
    return false;
  }
  detail = "(c) within 5% for all grid r^2 >= " + to_fraction_string(grid[from]) + ", J(" +
           to_fraction_string(grid.back()) + ")=" + fmt(js.back());
  return true;
}

Verdict averaging() {
  Verdict v;
  std::string a, b, c;
  bool ok_a = lemma_check(a), ok_b = mean_check(b), ok_c = limit_check(c);
  v.detail = a + "; " + b + "; " + c;
  v.pass = ok_a && ok_b && ok_c;
  return v;
}

Verdict enumeration_oracle() {
  Verdict v;
  Rng rng(7007);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 4;
    RationalMatrix b(n, n);
    do {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = uniform_between(rng, -3, 3);
    } while (determinant(b) == 0);
    RationalMatrix g = b * b.transpose();
    const long d = uniform_between(rng, 1, 4);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g(i, j) /= d;
    RationalVector center(n);
    for (auto& c : center) c = random_rational(rng, 9, 5);
    Rational radius = make_rational(uniform_between(rng, 0, 40), 4);
    auto got = enumerate_in_ball(g, center, radius);
    auto want = oracle::box_scan(g, center, radius);
    auto by_lex = [](const IntegerVector& x, const IntegerVector& y) {
      return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
    };
    std::sort(got.begin(), got.end(), by_lex);
    std::sort(want.begin(), want.end(), by_lex);
    if (got != want) v.fail("ball mismatch on instance " + std::to_string(t));
    if (shortest_norm_sq(g) != oracle::box_minimum(g)) v.fail("minimum mismatch on instance " + std::to_string(t));
  }
  if (v.pass) v.detail = "50 instances (dims 1-4, radius^2 <= 10), 0 discrepancies";
  return v;
}

Verdict normalization() {
  Verdict v;
  for (unsigned long m = 3; m <= 30; ++m) {
    auto ctx = make_context(m);
    if (determinant(gram(*ctx, ctx->codiff_basis())) * determinant(gram(*ctx, ctx->ok_basis())) != 1)
      v.fail("product != 1 at m=" + std::to_string(m));
  }
  if (v.pass) v.detail = "3 <= m <= 30, product exactly 1";
  return v;
}

Verdict corollary_table() {
  Verdict v;
  const char* argv[] = {"cyclopack", "table", "--g", "2,4,8,16", "--format", "csv"};
  std::ostringstream out, err;
  int code = cli::run(6, argv, out, err);
  if (code != 0) {
    v.fail("table exited with " + std::to_string(code));
    return v;
  }
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  const std::uint64_t gs[] = {2, 4, 8, 16};
  const std::uint64_t expect[] = {6, 12, 30, inverse_phi_max(16)};
  std::ostringstream summary;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::getline(in, line)) {
      v.fail("missing row");
      break;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 6) {
      v.fail("bad row: " + line);
      continue;
    }
    const std::uint64_t g = std::stoull(f[0]), mb = std::stoull(f[1]), bound = std::stoull(f[2]),
                        bs = std::stoull(f[3]);
    if (g != gs[i] || mb != expect[i]) v.fail("row " + line);
    if (bound < 3 * g) v.fail("bound below 3g: " + line);
    if (bound < 2 * g + 2) v.fail("bound below 2g+2: " + line);
    if (!(bound > bs && bs == 2)) v.fail("bound does not beat 2: " + line);
    if (f[4] != "true" || f[5] != "true") v.fail("flags: " + line);
    summary << " g=" << g << ":" << mb;
  }
  if (v.pass) v.detail = "m_best" + summary.str();
  return v;
}

Verdict round_trip() {
  Verdict v;
  if (g_certificates.empty()) {
    v.fail("no certificates to replay");
    return v;
  }
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "cyclopack_acceptance";
  fs::create_directories(dir);
  std::size_t i = 0;
  for (const auto& text : g_certificates) {
    Certificate c = certificate_from_json(nlohmann::json::parse(text));
    if (to_json(c).dump(2) != text) v.fail("re-serialization differs for certificate " + std::to_string(i));
    CertifyResult r = recertify(c);
    if (r.status != CertifyResult::Status::reproduced)
      v.fail("certificate " + std::to_string(i) + " not reproduced" +
             (r.mismatches.empty() ? std::string() : ": " + r.mismatches.front()));
    fs::path p = dir / ("cert" + std::to_string(i) + ".json");
    std::ofstream(p) << text << "\n";
    std::string ps = p.string();
    const char* argv[] = {"cyclopack", "certify", ps.c_str()};
    std::ostringstream out, err;
    if (cli::run(3, argv, out, err) != 0) v.fail("certify exited nonzero for certificate " + std::to_string(i));
    ++i;
  }
  fs::remove_all(dir);
  if (v.pass) v.detail = std::to_string(i) + " certificates reproduced byte-for-byte";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "small-degree witnesses", small_witnesses},
      {2, "degree 6 or 8 witness", larger_witness},
      {3, "principal polarization", principality},
      {4, "symmetry and stability", symmetry},
      {5, "N divisible by m", divisibility},
      {6, "averaging identities", averaging},
      {7, "enumeration oracle", enumeration_oracle},
      {8, "covolume normalization", normalization},
      {9, "corollary table", corollary_table},
      {10, "certificate round trip", round_trip},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", "
              << fmt(seconds_since(t0), 2) << " s): " << v.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
