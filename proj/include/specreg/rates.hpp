#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "specreg/estimator.hpp"
#include "specreg/filters.hpp"
#include "specreg/mercer.hpp"
#include "specreg/spectrum.hpp"

namespace specreg {

// Model class parameters theta = (M, sigma, R) together with the source exponent r and the
// covariance spectrum.
struct ModelParams {
  SpectrumProfile profile;
  double r;
  double M;
  double sigma;
  double R;
};

void validate(const ModelParams& params);
ModelParams model_params(const MercerProblem& problem);

// lambda_n = min(G^-1(sigma^2 / (R^2 n)), 1).
double lambda_rule(const ModelParams& params, std::size_t n);

// R * G^-1(sigma^2 / (R^2 n))^(r + s). s = 0 is the RKHS rate, s = 1/2 the L2 rate.
double theoretical_rate(const ModelParams& params, std::size_t n, double s);

struct Envelope {
  double bound = 0.0;
  bool admissible = false;  // n >= 64 lambda^-1 max(N(lambda), 1) log^2(8 / eta)
  bool qualified = false;   // filter qualification >= r + s
  double bias_term = 0.0;   // R (lambda^r + n^-1/2)
  double bernstein_term = 0.0;  // M / (n lambda)
  double variance_term = 0.0;   // sqrt(sigma^2 N(lambda) / (n lambda))
  double admissible_n = 0.0;
};

// Shape of the non-asymptotic high-probability upper bound, with a configurable leading
// constant (default 1, not certified).
Envelope envelope(const ModelParams& params, std::size_t n, double lambda, double eta, double s,
                  const FilterFamily& filter, double constant = 1.0);

struct RateConfig {
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 20;
  double s = 0.5;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct RateRow {
  std::size_t n = 0;
  double lambda = 0.0;
  double theoretical_rate = 0.0;
  std::vector<double> errors;  // one per replicate, in replicate order
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

struct RateReport {
  std::vector<RateRow> rows;
  double fitted_slope = 0.0;       // least-squares slope of log median error vs log n
  double theoretical_slope = 0.0;  // same fit applied to log theoretical_rate
  std::vector<std::string> warnings;
};

// Linear-interpolated quantile of an unsorted sample.
double quantile(std::vector<double> values, double q);
// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// For each n: lambda from the rule, `replicates` independent sample -> fit -> error_norm(s).
// Replicate k at grid index i draws from derive_seed(seed, i, k), so reports do not depend on
// the number of workers.
RateReport run_rate_experiment(const MercerProblem& problem, const FilterFamily& filter,
                               const RateConfig& config);

// Median error over replicates for each lambda on a fixed n (the oracle comparison). Each
// replicate's dataset is shared by all lambdas.
std::vector<double> lambda_sweep_median_errors(const MercerProblem& problem,
                                               const FilterFamily& filter, std::size_t n,
                                               std::span<const double> lambdas,
                                               std::size_t replicates, double s,
                                               std::uint64_t seed, unsigned jobs);

// Geometric grid of `count` points spanning [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

// Median errors change by at most `tolerance` (relative) upward as n increases.
bool monotone_within(const RateReport& report, double tolerance);

struct HoldoutEntry {
  double lambda;
  double holdout_mse;
};

struct HoldoutResult {
  double lambda_hat = 0.0;
  std::vector<HoldoutEntry> table;
  std::vector<double> coefficients;  // fit at lambda_hat on the training split
};

// Fits on the first floor(split_fraction * n) points and scores on the rest; ties go to the
// larger lambda.
HoldoutResult holdout_select(const MercerProblem& problem, const Dataset& data,
                             std::span<const double> lambda_grid, const FilterFamily& filter,
                             double split_fraction);

std::string rates_csv(const RateReport& report, const std::vector<std::string>& comments = {});
std::string slopes_csv(const RateReport& report, const std::vector<std::string>& comments = {});
std::string rates_svg(const RateReport& report);

}  // namespace specreg
