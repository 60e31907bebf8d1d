#include "specreg/spectrum_checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specreg/report_io.hpp"

namespace specreg {
namespace {

constexpr double kSlack = 1e-12;

void record(PropertyCheck& check, double lhs, double rhs) {
  ++check.tested;
  double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
  check.worst_ratio = std::max(check.worst_ratio, ratio);
  if (lhs > rhs * (1.0 + kSlack)) ++check.failed;
}

// G compared through finite values; an infinite lhs only passes against an infinite rhs.
void record_gee(PropertyCheck& check, ExtendedReal lhs, ExtendedReal rhs_base, double factor) {
  if (rhs_base.is_infinite()) {
    ++check.tested;
    return;
  }
  if (lhs.is_infinite()) {
    ++check.tested;
    ++check.failed;
    check.worst_ratio = INFINITY;
    return;
  }
  record(check, lhs.value(), factor * rhs_base.value());
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    grid[i] = lo * std::pow(hi / lo, f);
  }
  return grid;
}

}  // namespace

bool SpectrumCheckReport::all_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.ok(); });
}

std::vector<double> breakpoints(const SpectrumProfile& profile) {
  std::vector<double> out;
  for (double mu : profile.eigenvalues())
    if (out.empty() || mu < out.back()) out.push_back(mu);
  return out;
}

SpectrumCheckReport check_spectrum_properties(const SpectrumProfile& profile, double r,
                                              const CheckGrid& grid) {
  SpectrumCheckReport report;
  report.decay = verify_decay(profile);
  const bool eigup = report.decay.eigup_ok;
  const auto ts = breakpoints(profile);
  const double nu_star = profile.nu_upper();

  PropertyCheck scaling{"G_scaling"};
  for (double t : ts)
    for (double c : grid.c_values) record_gee(scaling, gee(profile, c * t, r), gee(profile, t, r), c);
  report.checks.push_back(scaling);

  PropertyCheck ratio_F{"F_ratio", eigup};
  PropertyCheck ratio_G{"G_ratio", eigup};
  if (eigup) {
    const double t0 = profile.eigenvalue(profile.j0());
    for (double C : grid.C_values) {
      const double fF = 4.0 * std::pow(C, 1.0 / nu_star);
      const double fG = 4.0 * std::pow(C, 2.0 * r + 1.0 + 1.0 / nu_star);
      for (double t : ts) {
        if (t > t0 / C) continue;
        record(ratio_F, static_cast<double>(count_F(profile, t)),
               fF * static_cast<double>(count_F(profile, C * t)));
        record_gee(ratio_G, gee(profile, C * t, r), gee(profile, t, r), fG);
      }
    }
  }
  report.checks.push_back(ratio_F);
  report.checks.push_back(ratio_G);

  PropertyCheck inverse_upper{"G_of_inverse_le_u"};
  PropertyCheck inverse_lower{"G_of_inverse_ge_u_over_4", eigup};
  {
    const double mu_p = profile.eigenvalue(profile.size());
    const double mu_1 = profile.eigenvalue(1);
    std::vector<double> us = log_grid(gee(profile, mu_p, r).value() * 1e-2,
                                      gee(profile, mu_1, r).value() * 1e2, grid.u_points);
    for (double t : ts) us.push_back(gee(profile, t, r).value());
    const std::size_t idx = std::min(2 * profile.j0(), profile.size());
    const double t_limit = std::min(profile.eigenvalue(idx), mu_1);
    for (double u : us) {
      const double t = gee_inverse(profile, u, r);
      const ExtendedReal g = gee(profile, t, r);
      record_gee(inverse_upper, g, ExtendedReal(u), 1.0);
      if (eigup && t < t_limit) record(inverse_lower, u / 4.0, g.value());
    }
  }
  report.checks.push_back(inverse_upper);
  report.checks.push_back(inverse_lower);

  const double nu = grid.effdim_nu > 0.0 ? grid.effdim_nu : profile.nu_lower();
  PropertyCheck effdim{"effdim_bound", eigup};
  if (eigup) {
    const double factor = effective_dimension_factor(nu);
    const double hi = profile.eigenvalue(profile.j0());
    const double lo = profile.eigenvalue(profile.size());
    for (double lambda : log_grid(lo, hi, grid.lambda_points)) {
      if (count_F(profile, lambda) < profile.j0()) continue;
      record(effdim, effective_dimension(profile, lambda),
             static_cast<double>(count_F(profile, lambda)) * factor);
    }
  }
  report.checks.push_back(effdim);
  return report;
}

std::string spectrum_check_summary(const SpectrumCheckReport& report,
                                   const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "eigup_ok = " << (report.decay.eigup_ok ? "true" : "false") << '\n';
  out << "eiglow_ok = " << (report.decay.eiglow_ok ? "true" : "false") << '\n';
  out << "decay_violations = " << report.decay.violations.size() << '\n';
  if (!report.decay.violations.empty()) {
    const auto& v = report.decay.violations.front();
    out << "first_violation = j " << v.j << " ratio " << format_real(v.ratio)
        << (v.eigup ? " EIGUP" : "") << (v.eiglow ? " EIGLOW" : "") << '\n';
  }
  for (const auto& check : report.checks) {
    out << check.name << " = ";
    if (!check.applicable) {
      out << "skipped (EIGUP not verified)\n";
      continue;
    }
    out << (check.ok() ? "pass" : "FAIL") << " tested " << check.tested << " failed " << check.failed
        << " worst_ratio " << format_real(check.worst_ratio) << '\n';
  }
  out << "all_checks = " << (report.all_ok() ? "pass" : "FAIL") << '\n';
  return out.str();
}

}  // namespace specreg
