#include "specreg/lowerbound.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "specreg/errors.hpp"
#include "specreg/parallel.hpp"
#include "specreg/report_io.hpp"

namespace specreg {
namespace {

constexpr std::size_t kMinPackingLength = 28;

using PackedCode = std::vector<std::uint64_t>;

std::size_t packed_distance(const PackedCode& a, const PackedCode& b) {
  std::size_t d = 0;
  for (std::size_t w = 0; w < a.size(); ++w) d += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
  return d;
}

// Smallest Hamming distance strictly above m/4.
std::size_t separation_threshold(std::size_t m) { return m / 4 + 1; }

}  // namespace

std::size_t hamming(const SignCode& a, const SignCode& b) {
  if (a.size() != b.size()) throw ShapeError("codes must have equal length");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1 : 0;
  return d;
}

double required_codes(std::size_t m) {
  return std::ceil(std::exp(static_cast<double>(m) / 36.0)) + 1.0;
}

PackingCertificate generate_packing(std::size_t m, std::uint64_t seed, std::size_t draw_budget) {
  if (m < kMinPackingLength) throw DomainError("packing construction needs m >= 28");
  const double needed = required_codes(m);
  if (!(needed <= static_cast<double>(kMaxExplicitCodes))) {
    std::ostringstream msg;
    msg << "packing of length m = " << m << " needs exp(m/36) + 1 = " << needed
        << " codes, beyond the explicit limit of " << kMaxExplicitCodes;
    throw ConstructionError(msg.str());
  }
  const auto target = static_cast<std::size_t>(needed);
  const std::size_t words = (m + 63) / 64;
  const std::uint64_t tail_mask = m % 64 == 0 ? ~0ull : ((1ull << (m % 64)) - 1);
  const std::size_t min_dist = separation_threshold(m);

  std::mt19937_64 rng(derive_seed(seed, m));
  std::vector<PackedCode> kept;
  std::size_t draws = 0;
  while (kept.size() < target) {
    if (draws++ >= draw_budget) {
      std::ostringstream msg;
      msg << "packing draw budget of " << draw_budget << " exhausted with " << kept.size() << " of "
          << target << " codes";
      throw ConstructionError(msg.str());
    }
    PackedCode candidate(words);
    for (auto& w : candidate) w = rng();
    candidate.back() &= tail_mask;
    bool ok = std::all_of(kept.begin(), kept.end(), [&](const PackedCode& c) {
      return packed_distance(c, candidate) >= min_dist;
    });
    if (ok) kept.push_back(std::move(candidate));
  }

  PackingCertificate cert;
  cert.m = m;
  cert.codes.reserve(kept.size());
  for (const auto& packed : kept) {
    SignCode code(m);
    for (std::size_t i = 0; i < m; ++i) code[i] = (packed[i / 64] >> (i % 64)) & 1ull ? -1 : 1;
    cert.codes.push_back(std::move(code));
  }
  cert.min_hamming = m;
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j)
      cert.min_hamming = std::min(cert.min_hamming, packed_distance(kept[i], kept[j]));
  cert.log_capacity = std::log(static_cast<double>(cert.codes.size() - 1));
  return cert;
}

PackingCheck verify_packing(const PackingCertificate& packing) {
  PackingCheck check;
  auto fail = [&](std::string why) {
    check.valid = false;
    check.failures.push_back(std::move(why));
  };
  const std::size_t m = packing.m;
  if (m < kMinPackingLength) fail("m < 28");
  if (packing.codes.size() < 2) {
    fail("fewer than two codes");
    return check;
  }
  std::size_t min_h = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < packing.codes.size(); ++i) {
    const auto& code = packing.codes[i];
    if (code.size() != m) {
      fail("code " + std::to_string(i) + " has wrong length");
      return check;
    }
    for (auto v : code)
      if (v != 1 && v != -1) {
        fail("code " + std::to_string(i) + " has an entry outside {-1, +1}");
        return check;
      }
    for (std::size_t j = 0; j < i; ++j) {
      std::size_t h = hamming(packing.codes[j], code);
      min_h = std::min(min_h, h);
      if (4 * h <= m)
        fail("codes " + std::to_string(j) + " and " + std::to_string(i) + " at Hamming distance " +
             std::to_string(h) + " <= m/4");
    }
  }
  if (min_h != packing.min_hamming) fail("recorded min_hamming does not match the codes");
  double log_cap = std::log(static_cast<double>(packing.codes.size() - 1));
  if (log_cap < static_cast<double>(m) / 36.0) fail("ln(N - 1) < m/36");
  return check;
}

double epsilon_threshold(const ModelParams& params, double s) {
  validate(params);
  const std::size_t idx = std::max(kMinPackingLength, params.profile.j0());
  if (idx > params.profile.size())
    throw DomainError("profile has fewer than max(28, j0) eigenvalues");
  return std::pow(2.0, -params.profile.nu_lower() * (params.r + s)) * params.R *
         params.profile.eigenvalue(idx);
}

std::size_t choose_m(double epsilon, const ModelParams& params, double s) {
  if (!(s >= 0.0 && s <= 0.5)) throw DomainError("norm index s must lie in [0, 1/2]");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const double threshold = epsilon_threshold(params, s);
  if (!(epsilon < threshold)) {
    std::ostringstream msg;
    msg << "epsilon = " << epsilon << " must be < 2^(-nu_lower (r+s)) R mu_max(28,j0) = " << threshold;
    throw DomainError(msg.str());
  }
  double t = std::pow(2.0, params.profile.nu_lower()) *
             std::pow(epsilon / params.R, 1.0 / (params.r + s));
  return count_F(params.profile, t);
}

AlternativeFamily build_alternatives(double epsilon, const ModelParams& params, double s,
                                     const PackingCertificate& packing) {
  const std::size_t m = choose_m(epsilon, params, s);
  if (packing.m != m) {
    std::ostringstream msg;
    msg << "packing length " << packing.m << " differs from m(eps) = " << m;
    throw ConstructionError(msg.str());
  }
  const std::size_t p = params.profile.size();
  if (p < 2 * m) {
    std::ostringstream msg;
    msg << "profile truncation p = " << p << " is shorter than 2m = " << 2 * m;
    throw ConstructionError(msg.str());
  }
  if (packing.codes.size() < 2) throw ConstructionError("packing needs at least two codes");

  AlternativeFamily family{.epsilon = epsilon, .m = m, .s = s, .params = params};
  const double scale = epsilon / std::sqrt(static_cast<double>(m));
  double norm_sq = 0.0;
  for (std::size_t l = m + 1; l <= 2 * m; ++l)
    norm_sq += std::pow(params.profile.eigenvalue(l), -2.0 * (params.r + s));
  family.source_norm_sq = scale * scale * norm_sq;
  if (family.source_norm_sq > params.R * params.R) {
    std::ostringstream msg;
    msg << "alternatives leave the source ball: ||g_i||^2 = " << family.source_norm_sq
        << " > R^2 = " << params.R * params.R;
    throw ConstructionError(msg.str());
  }

  for (std::size_t l = m + 1; l <= 2 * m; ++l) {
    family.block_mu.push_back(params.profile.eigenvalue(l));
    family.block_weight.push_back(std::pow(params.profile.eigenvalue(l), 2.0 * s));
  }
  family.fs.reserve(packing.codes.size());
  for (const auto& code : packing.codes) {
    if (code.size() != m) throw ConstructionError("packing code has the wrong length");
    std::vector<double> f(p, 0.0);
    for (std::size_t l = m + 1; l <= 2 * m; ++l)
      f[l - 1] = scale * code[l - m - 1] * std::pow(params.profile.eigenvalue(l), -s);
    family.fs.push_back(std::move(f));
  }

  family.min_separation_sq = std::numeric_limits<double>::infinity();
  const double eps_sq = epsilon * epsilon;
  for (std::size_t i = 0; i < family.fs.size(); ++i) {
    for (std::size_t j = i + 1; j < family.fs.size(); ++j) {
      double sep = separation_sq(family, i, j);
      if (!(sep > eps_sq)) {
        std::ostringstream msg;
        msg << "alternatives " << i << " and " << j << " are not separated: ||B^s(f_i - f_j)||^2 = "
            << sep << " <= eps^2 = " << eps_sq;
        throw ConstructionError(msg.str());
      }
      family.min_separation_sq = std::min(family.min_separation_sq, sep);
    }
  }
  return family;
}

double separation_sq(const AlternativeFamily& family, std::size_t i, std::size_t j) {
  if (i >= family.fs.size() || j >= family.fs.size()) throw RangeError("alternative index out of range");
  double sum = 0.0;
  for (std::size_t k = 0; k < family.m; ++k) {
    double diff = family.fs[i][family.m + k] - family.fs[j][family.m + k];
    sum += family.block_weight[k] * diff * diff;
  }
  return sum;
}

double kl_divergence(const AlternativeFamily& family, std::size_t i, std::size_t j, std::size_t n) {
  if (i >= family.fs.size() || j >= family.fs.size()) throw RangeError("alternative index out of range");
  if (i == j) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < family.m; ++k) {
    double diff = family.fs[i][family.m + k] - family.fs[j][family.m + k];
    sum += family.block_mu[k] * diff * diff;
  }
  const double sigma = family.params.sigma;
  return static_cast<double>(n) * sum / (2.0 * sigma * sigma);
}

double kl_bound_display(const AlternativeFamily& family, std::size_t n) {
  const auto& p = family.params;
  const double exponent = (2.0 * p.r + 1.0) / (p.r + family.s);
  return static_cast<double>(n) * std::pow(2.0, p.profile.nu_lower() * (1.0 - 2.0 * family.s)) /
         (2.0 * p.sigma * p.sigma) * p.R * p.R * std::pow(family.epsilon / p.R, exponent);
}

double kl_bound_corrected(const AlternativeFamily& family, std::size_t n) {
  return 4.0 * kl_bound_display(family, n);
}

FanoReport fano_report(const ModelParams& params, double s, std::size_t n, std::uint64_t seed) {
  validate(params);
  if (!(s >= 0.0 && s <= 0.5)) throw DomainError("norm index s must lie in [0, 1/2]");
  FanoReport report;
  report.n = n;
  report.s = s;
  const double u = params.sigma * params.sigma / (params.R * params.R * static_cast<double>(n));
  const double g_inv = gee_inverse(params.profile, u, params.r);
  report.theoretical_rate = theoretical_rate(params, n, s);
  report.epsilon = std::pow(2.0, -params.profile.nu_lower()) * params.R / 288.0 *
                   std::pow(g_inv, params.r + s);

  try {
    report.m = choose_m(report.epsilon, params, s);
  } catch (const DomainError& e) {
    report.reason = std::string("n too small for the construction: ") + e.what();
    return report;
  }
  if (report.m >= params.profile.size() || params.profile.size() < 2 * report.m) {
    report.reason = "profile truncation p = " + std::to_string(params.profile.size()) +
                    " too short for m = " + std::to_string(report.m) + " (needs p >= 2m)";
    return report;
  }
  try {
    report.packing = generate_packing(report.m, seed);
  } catch (const ConstructionError& e) {
    report.reason = std::string("packing: ") + e.what();
    return report;
  }
  report.codes = report.packing.codes.size();
  report.min_hamming = report.packing.min_hamming;
  report.log_capacity = report.packing.log_capacity;
  if (report.codes < 3) {
    report.reason = "Fano scheme needs at least two alternatives beyond the reference";
    return report;
  }

  std::optional<AlternativeFamily> built;
  try {
    built.emplace(build_alternatives(report.epsilon, params, s, report.packing));
  } catch (const ConstructionError& e) {
    report.reason = std::string("alternatives: ") + e.what();
    return report;
  }
  const AlternativeFamily& family = *built;
  report.min_separation_sq = family.min_separation_sq;
  report.kl_bound_display = kl_bound_display(family, n);
  report.kl_bound_corrected = kl_bound_corrected(family, n);
  report.kl_within_display = true;
  report.kl_within_corrected = true;
  const std::size_t N = report.codes;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      double kl = kl_divergence(family, i, j, n);
      report.pairs.push_back({i, j, hamming(report.packing.codes[i], report.packing.codes[j]),
                              separation_sq(family, i, j), kl});
      report.max_kl = std::max(report.max_kl, kl);
      report.kl_within_display = report.kl_within_display && kl <= report.kl_bound_display;
      report.kl_within_corrected = report.kl_within_corrected && kl <= report.kl_bound_corrected;
    }
  }
  // Reference measure: the last element.
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < N; ++j) sum += kl_divergence(family, j, N - 1, n);
  report.mean_kl = sum / static_cast<double>(N - 1);
  report.omega = report.mean_kl / report.log_capacity;
  const double root = std::sqrt(static_cast<double>(N - 1));
  report.lower_bound_prob = root / (1.0 + root) *
                            (1.0 - 2.0 * report.omega - std::sqrt(2.0 * report.omega / report.log_capacity));
  if (!(report.omega < 0.125)) {
    report.reason = "omega >= 1/8";
  } else if (!(report.lower_bound_prob > 0.0)) {
    report.reason = "Fano bound is not positive";
  } else {
    report.valid = true;
  }
  return report;
}

std::string fano_report_text(const FanoReport& report, const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "valid = " << (report.valid ? "true" : "false") << '\n';
  if (!report.reason.empty()) out << "reason = " << report.reason << '\n';
  out << "n = " << report.n << '\n'
      << "s = " << format_real(report.s) << '\n'
      << "epsilon = " << format_real(report.epsilon) << '\n'
      << "theoretical_rate = " << format_real(report.theoretical_rate) << '\n'
      << "m = " << report.m << '\n'
      << "codes = " << report.codes << '\n'
      << "min_hamming = " << report.min_hamming << '\n'
      << "log_capacity = " << format_real(report.log_capacity) << '\n'
      << "min_separation_sq = " << format_real(report.min_separation_sq) << '\n'
      << "mean_kl = " << format_real(report.mean_kl) << '\n'
      << "max_kl = " << format_real(report.max_kl) << '\n'
      << "kl_bound_display = " << format_real(report.kl_bound_display) << '\n'
      << "kl_within_display = " << (report.kl_within_display ? "true" : "false") << '\n'
      << "kl_bound_corrected = " << format_real(report.kl_bound_corrected) << '\n'
      << "kl_within_corrected = " << (report.kl_within_corrected ? "true" : "false") << '\n'
      << "omega = " << format_real(report.omega) << '\n'
      << "lower_bound_prob = " << format_real(report.lower_bound_prob) << '\n';
  return out.str();
}

std::string pairwise_kl_csv(const FanoReport& report, const std::vector<std::string>& comments) {
  CsvWriter csv({"i", "j", "hamming", "separation_sq", "kl", "kl_bound_display", "kl_bound_corrected"},
                comments);
  for (const auto& p : report.pairs) {
    if (p.j + 1 != report.codes) continue;
    csv.row({std::to_string(p.i), std::to_string(p.j), std::to_string(p.hamming),
             format_real(p.separation_sq), format_real(p.kl), format_real(report.kl_bound_display),
             format_real(report.kl_bound_corrected)});
  }
  return csv.str();
}

std::string packing_csv(const PackingCertificate& packing, const std::vector<std::string>& comments) {
  std::vector<std::string> columns;
  for (std::size_t l = 1; l <= packing.m; ++l) columns.push_back("c" + std::to_string(l));
  CsvWriter csv(columns, comments);
  for (const auto& code : packing.codes) {
    std::vector<std::string> cells;
    cells.reserve(code.size());
    for (auto v : code) cells.push_back(v > 0 ? "1" : "-1");
    csv.row(cells);
  }
  return csv.str();
}

}  // namespace specreg
