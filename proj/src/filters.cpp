#include "specreg/filters.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specreg/errors.hpp"
#include "specreg/report_io.hpp"

namespace specreg {
namespace {

constexpr double kVerifySlack = 1e-12;

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> grid(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  grid.back() = hi;
  return grid;
}

void check_domain(double lambda, double t) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("filter requires lambda in (0, 1]");
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("filter requires t in (0, 1]");
}

}  // namespace

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::tikhonov: return "tikhonov";
    case FilterKind::spectral_cutoff: return "spectral_cutoff";
    case FilterKind::landweber: return "landweber";
    case FilterKind::iterated_tikhonov: return "iterated_tikhonov";
  }
  return "unknown";
}

FilterKind filter_kind_from_string(const std::string& name) {
  if (name == "tikhonov") return FilterKind::tikhonov;
  if (name == "spectral_cutoff") return FilterKind::spectral_cutoff;
  if (name == "landweber") return FilterKind::landweber;
  if (name == "iterated_tikhonov") return FilterKind::iterated_tikhonov;
  throw ConfigError("unknown filter kind '" + name + "'");
}

FilterFamily FilterFamily::tikhonov() {
  return FilterFamily(FilterKind::tikhonov, {1.0, 1.0, 1.0, 1.0, 1.0});
}

FilterFamily FilterFamily::spectral_cutoff(double qualification) {
  return FilterFamily(FilterKind::spectral_cutoff, {1.0, 1.0, 1.0, qualification, 1.0});
}

FilterFamily FilterFamily::landweber(double step, double qualification) {
  if (!(step > 0.0 && step <= 1.0)) throw DomainError("landweber step must lie in (0, 1]");
  // sup_t (1 - t)^m t^q <= (q / (e m))^q up to the floor(1/lambda) rounding, hence (q/e)^q v 1.
  double gamma_q = std::max(std::pow(qualification / std::exp(1.0), qualification), 1.0);
  FilterFamily f(FilterKind::landweber, {1.0, 1.0, 1.0, qualification, gamma_q});
  f.step_ = step;
  return f;
}

FilterFamily FilterFamily::iterated_tikhonov(unsigned m) {
  if (m == 0) throw DomainError("iterated_tikhonov needs m >= 1");
  // g(0+) = m / lambda, residual (lambda / (t + lambda))^m gives qualification m.
  FilterFamily f(FilterKind::iterated_tikhonov,
                 {1.0, static_cast<double>(m), 1.0, static_cast<double>(m), 1.0});
  f.m_ = m;
  return f;
}

FilterFamily FilterFamily::with_constants(FilterConstants constants) const {
  FilterFamily copy = *this;
  copy.constants_ = constants;
  return copy;
}

unsigned landweber_iterations(double lambda) {
  return static_cast<unsigned>(std::max(1.0, std::floor(1.0 / lambda)));
}

double FilterFamily::g(double lambda, double t) const {
  switch (kind_) {
    case FilterKind::tikhonov:
      return 1.0 / (t + lambda);
    case FilterKind::spectral_cutoff:
      return t >= lambda ? 1.0 / t : 0.0;
    case FilterKind::landweber: {
      // step * sum_{i<m} (1 - step t)^i = (1 - (1 - step t)^m) / t
      unsigned m = landweber_iterations(lambda);
      if (t * step_ < 1e-12) return step_ * m;
      return -std::expm1(m * std::log1p(-step_ * t)) / t;
    }
    case FilterKind::iterated_tikhonov: {
      if (t == 0.0) return static_cast<double>(m_) / lambda;
      // (1 - (lambda / (t + lambda))^m) / t, with log ratio = -log1p(t / lambda)
      return -std::expm1(-static_cast<double>(m_) * std::log1p(t / lambda)) / t;
    }
  }
  return 0.0;
}

double FilterFamily::residual(double lambda, double t) const {
  switch (kind_) {
    case FilterKind::tikhonov:
      return lambda / (t + lambda);
    case FilterKind::spectral_cutoff:
      return t >= lambda ? 0.0 : 1.0;
    case FilterKind::landweber:
      return std::pow(1.0 - step_ * t, static_cast<double>(landweber_iterations(lambda)));
    case FilterKind::iterated_tikhonov:
      return std::pow(lambda / (t + lambda), static_cast<double>(m_));
  }
  return 1.0;
}

double g_value(const FilterFamily& filter, double lambda, double t) {
  check_domain(lambda, t);
  return filter.g(lambda, t);
}

double r_value(const FilterFamily& filter, double lambda, double t) {
  check_domain(lambda, t);
  return 1.0 - t * filter.g(lambda, t);
}

ConstantsReport verify_constants(const FilterFamily& filter, std::size_t grid_size) {
  if (grid_size < 2) throw DomainError("verify_constants needs grid_size >= 2");
  const auto grid = log_grid(1e-6, 1.0, grid_size);
  const FilterConstants& declared = filter.constants();
  const double q = declared.qualification;

  ConditionCheck d{"D", declared.D, 0.0, 0.0, 0.0, true};
  ConditionCheck e{"E", declared.E, 0.0, 0.0, 0.0, true};
  ConditionCheck g0{"gamma0", declared.gamma0, 0.0, 0.0, 0.0, true};
  ConditionCheck gq{"gamma_q", declared.gamma_q, 0.0, 0.0, 0.0, true};
  auto update = [](ConditionCheck& c, double v, double lambda, double t) {
    if (v > c.measured) {
      c.measured = v;
      c.worst_lambda = lambda;
      c.worst_t = t;
    }
  };
  for (double lambda : grid) {
    for (double t : grid) {
      double gv = filter.g(lambda, t);
      double rv = 1.0 - t * gv;
      update(d, std::abs(t * gv), lambda, t);
      update(e, std::abs(gv) * lambda, lambda, t);
      update(g0, std::abs(rv), lambda, t);
      update(gq, std::abs(filter.residual(lambda, t)) * std::pow(t / lambda, q), lambda, t);
    }
  }
  ConstantsReport report;
  for (ConditionCheck* c : {&d, &e, &g0, &gq}) {
    c->holds = c->measured <= c->declared + kVerifySlack;
    report.holds = report.holds && c->holds;
    report.conditions.push_back(*c);
  }
  report.D_hat = d.measured;
  report.E_hat = e.measured;
  report.gamma0_hat = g0.measured;
  return report;
}

std::vector<QualificationResult> measure_qualification(const FilterFamily& filter,
                                                       std::span<const double> q_candidates,
                                                       std::size_t grid_size) {
  if (grid_size < 2) throw DomainError("measure_qualification needs grid_size >= 2");
  std::vector<QualificationResult> results;
  for (double q : q_candidates) {
    if (!(q > 0.0)) throw DomainError("qualification candidates must be positive");
    QualificationResult res{q, 0.0, false, {}};
    for (double lambda_min : {1e-2, 1e-4, 1e-6}) {
      const auto lambdas = log_grid(lambda_min, 1.0, grid_size);
      const auto ts = log_grid(std::min(lambda_min, 1e-6), 1.0, grid_size);
      double sup = 0.0;
      for (double lambda : lambdas)
        for (double t : ts)
          sup = std::max(sup, std::abs(filter.residual(lambda, t)) * std::pow(t / lambda, q));
      res.refinement_sups.push_back(sup);
    }
    res.gamma_q_hat = res.refinement_sups.back();
    res.saturates = res.refinement_sups[1] >= 2.0 * res.refinement_sups[0] &&
                    res.refinement_sups[2] >= 2.0 * res.refinement_sups[1];
    results.push_back(std::move(res));
  }
  return results;
}

std::string constants_report_csv(const ConstantsReport& report) {
  CsvWriter csv({"condition", "declared", "measured", "worst_lambda", "worst_t"});
  for (const auto& c : report.conditions)
    csv.row({c.condition, format_real(c.declared), format_real(c.measured),
             format_real(c.worst_lambda), format_real(c.worst_t)});
  return csv.str();
}

}  // namespace specreg
