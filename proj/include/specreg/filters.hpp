#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace specreg {

enum class FilterKind { tikhonov, spectral_cutoff, landweber, iterated_tikhonov };

std::string to_string(FilterKind kind);
FilterKind filter_kind_from_string(const std::string& name);

// Declared constants of a spectral filter g_lambda on (0, 1]:
//   sup |t g(t)| <= D, sup |g(t)| <= E / lambda, sup |r(t)| <= gamma0,
//   sup |r(t)| t^q <= gamma_q lambda^q   (q = qualification).
struct FilterConstants {
  double D = 1.0;
  double E = 1.0;
  double gamma0 = 1.0;
  double qualification = 1.0;
  double gamma_q = 1.0;
};

class FilterFamily {
 public:
  static FilterFamily tikhonov();
  static FilterFamily spectral_cutoff(double qualification = 4.0);
  // Gradient descent with the given step; lambda maps to floor(1 / lambda) iterations.
  static FilterFamily landweber(double step = 1.0, double qualification = 4.0);
  static FilterFamily iterated_tikhonov(unsigned m);

  // Replace the default certified constants (they are still verified, never trusted).
  FilterFamily with_constants(FilterConstants constants) const;

  FilterKind kind() const { return kind_; }
  double step() const { return step_; }
  unsigned iterations() const { return m_; }
  const FilterConstants& constants() const { return constants_; }

  // Unchecked evaluation for t >= 0 (used on empirical spectra after clipping); t = 0 gives
  // the limit g(0+).
  double g(double lambda, double t) const;
  double residual(double lambda, double t) const;

 private:
  FilterFamily(FilterKind kind, FilterConstants constants) : kind_(kind), constants_(constants) {}

  FilterKind kind_;
  FilterConstants constants_;
  double step_ = 1.0;
  unsigned m_ = 1;
};

// Landweber iteration count for a given lambda.
unsigned landweber_iterations(double lambda);

// Domain-checked g_lambda(t) and r_lambda(t) = 1 - t g_lambda(t) for lambda, t in (0, 1].
double g_value(const FilterFamily& filter, double lambda, double t);
double r_value(const FilterFamily& filter, double lambda, double t);

struct ConditionCheck {
  std::string condition;  // "D", "E", "gamma0", "gamma_q"
  double declared;
  double measured;
  double worst_lambda;
  double worst_t;
  bool holds;
};

struct ConstantsReport {
  bool holds = true;
  double D_hat = 0.0;
  double E_hat = 0.0;
  double gamma0_hat = 0.0;
  std::vector<ConditionCheck> conditions;
};

// Grid sweep over log-spaced lambda, t in [1e-6, 1] with grid_size points per axis.
ConstantsReport verify_constants(const FilterFamily& filter, std::size_t grid_size);

struct QualificationResult {
  double q;
  double gamma_q_hat;  // sup over the finest grid
  bool saturates;
  std::vector<double> refinement_sups;
};

// For each q: sup |r| t^q / lambda^q over grids whose smallest lambda goes 1e-2, 1e-4, 1e-6.
// Saturation means the sup at least doubles on every refinement.
std::vector<QualificationResult> measure_qualification(const FilterFamily& filter,
                                                       std::span<const double> q_candidates,
                                                       std::size_t grid_size);

std::string constants_report_csv(const ConstantsReport& report);

}  // namespace specreg
