#pragma once

// Randomized exact invariant suites over random rational instances.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cyclopack/averaging_search.hpp"
#include "cyclopack/cyclotomic.hpp"
#include "cyclopack/polarized_lattice.hpp"
#include "cyclopack/random.hpp"
#include "cyclopack/trace_geometry.hpp"

namespace cyclopack {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::optional<std::string> failure;  // first failing instance
};

namespace detail {

inline std::string describe(const CycloElement& e) {
  std::string s = "[";
  for (std::size_t i = 0; i < e.coords.size(); ++i) {
    if (i) s += ", ";
    s += to_fraction_string(e.coords[i]);
  }
  return s + "]";
}

inline Rational random_r_sq(Rng& rng) {
  // Uniform over {k/d : d <= 8} restricted to [1/2, 4].
  for (;;) {
    long d = uniform_between(rng, 1, 8);
    long k = uniform_between(rng, 1, 4 * d);
    Rational q = make_rational(k, d);
    if (q >= Rational(1, 2)) return q;
  }
}

}  // namespace detail

/// |zeta^k * z|^2 = |z|^2 for every k in [0, m).
inline SuiteResult verify_norm_invariance(const CyclotomicContext& ctx, std::size_t trials, Rng& rng) {
  SuiteResult res{"norm invariance under G", 0, std::nullopt};
  for (std::size_t t = 0; t < trials && !res.failure; ++t) {
    PointEZ z = random_point(ctx, rng);
    Rational n0 = norm_sq(ctx, z);
    for (unsigned long k = 0; k < ctx.m(); ++k) {
      ++res.cases;
      if (norm_sq(ctx, g_act(ctx, GroupElement{k}, z)) != n0) {
        res.failure = "m=" + std::to_string(ctx.m()) + " k=" + std::to_string(k) + " x=" + detail::describe(z.x) +
                      " y=" + detail::describe(z.y);
        break;
      }
    }
  }
  return res;
}

/// Integrality, unimodularity, covolume one, G-stability and real
/// multiplication of Gamma(r^2, x) for random r^2 in [1/2, 4] and rational x.
inline std::vector<SuiteResult> verify_lattices(ContextPtr ctx, std::size_t trials, Rng& rng) {
  SuiteResult integrality{"Riemann form integrality", 0, std::nullopt};
  SuiteResult unimodular{"principal polarization (det = 1)", 0, std::nullopt};
  SuiteResult covolume{"covolume one", 0, std::nullopt};
  SuiteResult g_stable{"G-stability", 0, std::nullopt};
  SuiteResult real_mult{"real multiplication", 0, std::nullopt};
  for (std::size_t t = 0; t < trials; ++t) {
    Rational r_sq = detail::random_r_sq(rng);
    CycloElement x = random_element(*ctx, rng);
    PolarizedLattice lat = build_lattice(ctx, r_sq, x);
    std::string inst = "m=" + std::to_string(ctx->m()) + " r_sq=" + to_fraction_string(r_sq) + " x=" + detail::describe(x);
    auto record = [&](SuiteResult& s, bool ok) {
      ++s.cases;
      if (!ok && !s.failure) s.failure = inst;
    };
    record(integrality, check_riemann_integrality(lat));
    record(unimodular, determinant(lat.symplectic) == 1);
    record(covolume, determinant(lat.real_gram) == 1);
    record(g_stable, check_g_stability(lat));
    record(real_mult, check_real_multiplication(lat));
  }
  return {integrality, unimodular, covolume, g_stable, real_mult};
}

/// N(x) is a multiple of m at the selected radius.
inline SuiteResult verify_n_divisibility(ContextPtr ctx, std::size_t trials, Rng& rng,
                                         const Rational& epsilon = Rational(1, 2)) {
  SuiteResult res{"N(x) divisible by m", 0, std::nullopt};
  auto choice = select_r(*ctx, ctx->m(), epsilon, default_r_grid());
  if (!choice) {
    res.failure = "no admissible radius on the default grid for m=" + std::to_string(ctx->m());
    return res;
  }
  NCounter counter(ctx, choice->r_sq, ctx->m(), epsilon);
  for (std::size_t t = 0; t < trials && !res.failure; ++t) {
    CycloElement x = random_element(*ctx, rng);
    long n = counter.count(x);
    ++res.cases;
    if (n % static_cast<long>(ctx->m()) != 0)
      res.failure = "m=" + std::to_string(ctx->m()) + " r_sq=" + to_fraction_string(choice->r_sq) +
                    " x=" + detail::describe(x) + " N=" + std::to_string(n);
  }
  return res;
}

/// det Gram(O_K) * det Gram(I) = 1.
inline SuiteResult verify_covolume_product(const CyclotomicContext& ctx) {
  SuiteResult res{"covolume product", 1, std::nullopt};
  Rational prod = determinant(gram(ctx, ctx.ok_basis())) * determinant(gram(ctx, ctx.codiff_basis()));
  if (prod != 1) res.failure = "m=" + std::to_string(ctx.m()) + " product=" + to_fraction_string(prod);
  return res;
}

/// Runs every suite; a suite that throws (for instance on a degenerate Gram
/// matrix in a broken build) is reported as failed rather than aborting the run.
inline std::vector<SuiteResult> run_verification(unsigned long m, std::size_t trials, std::uint64_t seed) {
  ContextPtr ctx = make_context(m);
  Rng rng(seed);
  std::vector<SuiteResult> all;
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      all.push_back({name, 0, "m=" + std::to_string(m) + " raised: " + e.what()});
    }
  };
  guarded("norm invariance under G", [&] { all.push_back(verify_norm_invariance(*ctx, trials, rng)); });
  guarded("lattice checks", [&] {
    for (auto& s : verify_lattices(ctx, trials, rng)) all.push_back(std::move(s));
  });
  guarded("N(x) divisible by m", [&] { all.push_back(verify_n_divisibility(ctx, trials, rng)); });
  guarded("covolume product", [&] { all.push_back(verify_covolume_product(*ctx)); });
  return all;
}

}  // namespace cyclopack
