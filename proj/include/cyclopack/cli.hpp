#pragma once

// Command-line front end: construct, search, certify, verify, table, primorial.
//
// Exit codes: 0 success, 1 failed checks or certificate mismatch, 2 invalid
// input, 3 search exhausted (budget or radius grid).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cyclopack/averaging_search.hpp"
#include "cyclopack/bounds_tables.hpp"
#include "cyclopack/polarized_lattice.hpp"
#include "cyclopack/verification.hpp"

namespace cyclopack::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kInvalid = 2, kExhausted = 3 };

/// Writes to `path` through a temporary file and a rename, or to `out` when
/// `path` is empty.
inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << text;
    if (!f.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

inline unsigned default_precision() {
  if (const char* env = std::getenv("CYCLOPACK_PRECISION")) {
    try {
      long v = std::stol(env);
      if (v >= 53 && v <= 65536) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw DomainError(std::string("CYCLOPACK_PRECISION must be an integer in [53, 65536], got ") + env);
  }
  return kDefaultPrecisionBits;
}

/// "0" is the zero element; otherwise g comma-separated power-basis rationals.
inline CycloElement parse_element(const CyclotomicContext& ctx, const std::string& text) {
  if (text == "0") return ctx.zero();
  CycloElement e = ctx.zero();
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= ctx.degree()) throw DomainError("x has more than g = " + std::to_string(ctx.degree()) + " coordinates");
    e.coords[i++] = parse_rational(item);
  }
  if (i != ctx.degree()) throw DomainError("x needs g = " + std::to_string(ctx.degree()) + " coordinates");
  return e;
}

inline std::vector<std::uint64_t> parse_g_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw DomainError("bad g value: '" + item + "'");
    std::uint64_t g = std::stoull(item);
    if (g == 0 || g > 4096) throw DomainError("g values must lie in [1, 4096]");
    out.push_back(g);
  }
  if (out.empty()) throw DomainError("empty g list");
  return out;
}

struct Options {
  long m = 0;
  std::string r_sq = "1";
  std::string x = "0";
  std::string epsilon = "1/2";
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
  unsigned long denom = 8;
  unsigned precision = 0;
  unsigned workers = 0;
  std::size_t trials = 100;
  std::string g_list;
  long primorial_x = 0;
  std::string output;
  std::string format = "json";
  std::string cert_path;
};

inline int cmd_construct(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.m < 3) throw DomainError("m must be at least 3");
  ContextPtr ctx = make_context(static_cast<unsigned long>(o.m));
  Rational r_sq = parse_rational(o.r_sq);
  if (sgn(r_sq) <= 0) throw DomainError("r^2 must be positive");
  CycloElement x = parse_element(*ctx, o.x);
  PolarizedLattice lat = build_lattice(ctx, r_sq, x);
  nlohmann::json j = to_json(lat);
  const bool integral = check_riemann_integrality(lat);
  const Rational det_symp = determinant(lat.symplectic);
  const Rational det_gram = determinant(lat.real_gram);
  j["det_symplectic"] = to_fraction_string(det_symp);
  j["det_real_gram"] = to_fraction_string(det_gram);
  j["checks"] = {{"integrality", integral},
                 {"unimodular", integral && abs(det_symp) == 1},
                 {"g_stable", check_g_stability(lat)},
                 {"real_mult", check_real_multiplication(lat)},
                 {"covolume_one", det_gram == 1}};
  emit(j.dump(2) + "\n", o.output, out);
  bool ok = true;
  for (const auto& [k, v] : j["checks"].items()) ok = ok && v.get<bool>();
  if (!ok) err << "construct: some lattice checks failed\n";
  return ok ? kOk : kFailed;
}

inline int cmd_search(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.m < 3) throw DomainError("m must be at least 3");
  SearchConfig cfg;
  cfg.m = static_cast<unsigned long>(o.m);
  cfg.epsilon = parse_rational(o.epsilon);
  if (sgn(cfg.epsilon) <= 0 || cfg.epsilon >= Rational(cfg.m)) throw DomainError("epsilon must satisfy 0 < eps < m");
  if (o.denom == 0) throw DomainError("denom must be positive");
  if (o.budget == 0) throw DomainError("budget must be positive");
  cfg.denom = o.denom;
  cfg.budget = o.budget;
  cfg.seed = o.seed;
  cfg.precision = o.precision ? o.precision : default_precision();
  cfg.workers = o.workers;
  SearchOutcome res = search(cfg);
  switch (res.status) {
    case SearchOutcome::Status::no_radius:
      err << "search: no grid radius satisfies both radius conditions\n";
      return kExhausted;
    case SearchOutcome::Status::budget_exhausted:
      err << "search: budget of " << cfg.budget << " samples exhausted; best N = "
          << (res.best_n ? std::to_string(*res.best_n) : std::string("n/a")) << "\n";
      return kExhausted;
    case SearchOutcome::Status::invalid_certificate:
      emit(to_json(*res.certificate).dump(2) + "\n", o.output, out);
      err << "search: certificate failed validation\n";
      return kFailed;
    case SearchOutcome::Status::certified:
      emit(to_json(*res.certificate).dump(2) + "\n", o.output, out);
      return kOk;
  }
  return kFailed;
}

inline int cmd_certify(const Options& o, std::ostream& out, std::ostream& err) {
  std::ifstream f(o.cert_path, std::ios::binary);
  if (!f) throw DomainError("cannot read " + o.cert_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("certificate is not valid JSON: ") + e.what());
  }
  Certificate stored = certificate_from_json(j);
  CertifyResult res = recertify(stored);
  switch (res.status) {
    case CertifyResult::Status::reproduced:
      out << "certificate reproduced and valid: 4^g V > " << to_fraction_string(stored.bound_lo) << " > m - eps\n";
      return kOk;
    case CertifyResult::Status::invalid:
      err << "certificate reproduced but does not certify m - eps\n";
      return kFailed;
    case CertifyResult::Status::mismatch:
      for (const auto& mm : res.mismatches) err << "mismatch " << mm << "\n";
      return kFailed;
  }
  return kFailed;
}

inline int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.m < 3) throw DomainError("m must be at least 3");
  if (o.trials == 0) throw DomainError("trials must be positive");
  auto results = run_verification(static_cast<unsigned long>(o.m), o.trials, o.seed);
  bool ok = true;
  for (const auto& r : results) {
    out << (r.failure ? "FAIL " : "ok   ") << r.name << " (" << r.cases << " cases)\n";
    if (r.failure) {
      ok = false;
      err << "failing instance [" << r.name << "]: " << *r.failure << "\n";
    }
  }
  return ok ? kOk : kFailed;
}

inline int cmd_table(const Options& o, std::ostream& out, std::ostream&) {
  auto rows = bound_table(parse_g_list(o.g_list));
  if (o.format == "csv") emit(bound_table_csv(rows), o.output, out);
  else emit(bound_table_json(rows).dump(2) + "\n", o.output, out);
  return kOk;
}

inline int cmd_primorial(const Options& o, std::ostream& out, std::ostream&) {
  if (o.primorial_x < 3) throw DomainError("x must be at least 3");
  PrimorialRow row = primorial_row(static_cast<std::uint64_t>(o.primorial_x));
  if (o.format == "csv") {
    std::ostringstream s;
    s << "x,m,g,bound,mertens_estimate\n"
      << row.x << ',' << row.m.get_str() << ',' << row.g.get_str() << ',' << row.bound() << ','
      << row.mertens_estimate << '\n';
    emit(s.str(), o.output, out);
  } else {
    nlohmann::json j{{"x", row.x},
                     {"m", row.m.get_str()},
                     {"g", row.g.get_str()},
                     {"bound", row.bound()},
                     {"mertens_estimate", row.mertens_estimate}};
    emit(j.dump(2) + "\n", o.output, out);
  }
  return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"cyclopack: certified cyclotomic lattice packings for principally polarized abelian varieties"};
  app.require_subcommand(1);
  Options o;

  auto* construct = app.add_subcommand("construct", "build Gamma(r^2, x) and check its polarization");
  construct->add_option("--m", o.m, "cyclotomic conductor m >= 3")->required();
  construct->add_option("--r2", o.r_sq, "r^2 as p/q")->required();
  construct->add_option("--x", o.x, "x as 0 or g comma-separated power-basis rationals");
  construct->add_option("-o,--out", o.output, "output path (default stdout)");

  auto* search_cmd = app.add_subcommand("search", "averaging search and certificate emission");
  search_cmd->add_option("--m", o.m, "cyclotomic conductor m >= 3")->required();
  search_cmd->add_option("--epsilon", o.epsilon, "epsilon as p/q, 0 < eps < m");
  search_cmd->add_option("--budget", o.budget, "maximum number of x samples");
  search_cmd->add_option("--seed", o.seed, "RNG seed (mt19937_64)");
  search_cmd->add_option("--denom", o.denom, "denominator of sampled x coordinates");
  search_cmd->add_option("--precision", o.precision, "interval precision in bits");
  search_cmd->add_option("--workers", o.workers, "worker threads (0 = hardware)");
  search_cmd->add_option("-o,--out", o.output, "output path (default stdout)");

  auto* certify = app.add_subcommand("certify", "recompute and validate a stored certificate");
  certify->add_option("cert", o.cert_path, "certificate JSON path")->required();

  auto* verify = app.add_subcommand("verify", "run the randomized exact invariant suites");
  verify->add_option("--m", o.m, "cyclotomic conductor m >= 3")->required();
  verify->add_option("--trials", o.trials, "random instances per suite");
  verify->add_option("--seed", o.seed, "RNG seed");

  auto* table = app.add_subcommand("table", "bound table 4^g V_g >= m_best");
  table->add_option("--g", o.g_list, "comma-separated g values")->required();
  table->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  table->add_option("-o,--out", o.output, "output path (default stdout)");

  auto* primorial = app.add_subcommand("primorial", "primorial row m = prod_{p <= x} p");
  primorial->add_option("--x", o.primorial_x, "x >= 3")->required();
  primorial->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  primorial->add_option("-o,--out", o.output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kInvalid;
  }

  try {
    if (*construct) return cmd_construct(o, out, err);
    if (*search_cmd) return cmd_search(o, out, err);
    if (*certify) return cmd_certify(o, out, err);
    if (*verify) return cmd_verify(o, out, err);
    if (*table) return cmd_table(o, out, err);
    if (*primorial) return cmd_primorial(o, out, err);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace cyclopack::cli
