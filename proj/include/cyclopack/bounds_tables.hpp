#pragma once

// Totient arithmetic behind the lower bounds 4^g V_g >= m for g = phi(m),
// compared with the Buser-Sarnak bound 4^g V_g >= 2.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclopack/rational.hpp"

namespace cyclopack {

inline std::uint64_t phi(std::uint64_t m) {
  if (m == 0) throw DomainError("phi: m must be positive");
  std::uint64_t result = m;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    while (m % p == 0) m /= p;
    result -= result / p;
  }
  if (m > 1) result -= result / m;
  return result;
}

/// Largest m >= 3 with phi(m) = g, or 0. phi(m) >= sqrt(m / 2) bounds the scan by 2 g^2.
inline std::uint64_t inverse_phi_max(std::uint64_t g) {
  if (g == 0) throw DomainError("inverse_phi_max: g must be positive");
  for (std::uint64_t m = 2 * g * g + 1; m >= 3; --m)
    if (phi(m) == g) return m;
  return 0;
}

inline bool is_power_of_two(std::uint64_t g) { return g != 0 && (g & (g - 1)) == 0; }

struct BoundRow {
  std::uint64_t g = 0;
  std::uint64_t m_best = 0;  // 0: no m >= 3 with phi(m) = g
  std::uint64_t buser_sarnak = 2;
  /// m_best >= 3g, only meaningful when g is a power of two (g >= 2).
  std::optional<bool> cor12_alpha_ok;
  /// m_best >= 2g + 2, only meaningful when m_best > 0.
  std::optional<bool> cor12_beta_ok;

  bool has_witness() const { return m_best > 0; }
};

inline std::vector<BoundRow> bound_table(const std::vector<std::uint64_t>& g_list) {
  std::vector<BoundRow> rows;
  for (std::uint64_t g : g_list) {
    BoundRow row;
    row.g = g;
    row.m_best = inverse_phi_max(g);
    if (g >= 2 && is_power_of_two(g)) row.cor12_alpha_ok = row.m_best >= 3 * g;
    if (row.m_best > 0) row.cor12_beta_ok = row.m_best >= 2 * g + 2;
    rows.push_back(row);
  }
  return rows;
}

inline std::string bound_table_csv(const std::vector<BoundRow>& rows) {
  auto flag = [](const std::optional<bool>& f) -> std::string {
    if (!f) return "n/a";
    return *f ? "true" : "false";
  };
  std::ostringstream out;
  out << "g,m_best,bound_4gVg,buser_sarnak,cor12_alpha,cor12_beta\n";
  for (const auto& r : rows) {
    out << r.g << ',' << r.m_best << ',';
    if (r.has_witness()) out << r.m_best;
    else out << "no witness";
    out << ',' << r.buser_sarnak << ',' << flag(r.cor12_alpha_ok) << ',' << flag(r.cor12_beta_ok) << '\n';
  }
  return out.str();
}

inline nlohmann::json bound_table_json(const std::vector<BoundRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["g"] = r.g;
    j["m_best"] = r.m_best;
    j["bound_4gVg"] = r.has_witness() ? nlohmann::json(r.m_best) : nlohmann::json("no witness");
    j["buser_sarnak"] = r.buser_sarnak;
    j["cor12_alpha"] = r.cor12_alpha_ok ? nlohmann::json(*r.cor12_alpha_ok) : nlohmann::json(nullptr);
    j["cor12_beta"] = r.cor12_beta_ok ? nlohmann::json(*r.cor12_beta_ok) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

struct PrimorialRow {
  std::uint64_t x = 0;
  Integer m;  // product of primes p <= x
  Integer g;  // phi(m) = product of (p - 1)
  /// e^gamma g ln ln g; diagnostic only.
  double mertens_estimate = 0;

  std::string bound() const { return "4^g*V_g >= " + m.get_str(); }
};

inline PrimorialRow primorial_row(std::uint64_t x) {
  if (x < 3) throw DomainError("primorial_row: x must be at least 3");
  PrimorialRow row;
  row.x = x;
  row.m = 1;
  row.g = 1;
  for (std::uint64_t p = 2; p <= x; ++p) {
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= p; ++d)
      if (p % d == 0) {
        prime = false;
        break;
      }
    if (!prime) continue;
    row.m *= p;
    row.g *= p - 1;
  }
  constexpr double kEulerGamma = 0.57721566490153286061;
  const double g = row.g.get_d();
  row.mertens_estimate = g > std::exp(1.0) ? std::exp(kEulerGamma) * g * std::log(std::log(g)) : 0.0;
  return row;
}

}  // namespace cyclopack
