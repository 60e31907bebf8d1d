#include "specreg/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "specreg/errors.hpp"
#include "specreg/parallel.hpp"
#include "specreg/report_io.hpp"

namespace specreg {

void validate(const ModelParams& params) {
  if (!(params.r > 0.0)) throw DomainError("r must be positive");
  if (!(params.M > 0.0 && params.sigma > 0.0 && params.R > 0.0))
    throw DomainError("model parameters (M, sigma, R) must be positive");
}

ModelParams model_params(const MercerProblem& problem) {
  return ModelParams{problem.profile(), problem.source().r, problem.M(), problem.noise().sigma(),
                     problem.source().R};
}

namespace {

double rule_argument(const ModelParams& params, std::size_t n) {
  if (n < 1) throw DomainError("n must be >= 1");
  validate(params);
  return params.sigma * params.sigma / (params.R * params.R * static_cast<double>(n));
}

}  // namespace

double lambda_rule(const ModelParams& params, std::size_t n) {
  return std::min(gee_inverse(params.profile, rule_argument(params, n), params.r), 1.0);
}

double theoretical_rate(const ModelParams& params, std::size_t n, double s) {
  if (!(s >= 0.0 && s <= 0.5)) throw DomainError("norm index s must lie in [0, 1/2]");
  double t = gee_inverse(params.profile, rule_argument(params, n), params.r);
  return params.R * std::pow(t, params.r + s);
}

Envelope envelope(const ModelParams& params, std::size_t n, double lambda, double eta, double s,
                  const FilterFamily& filter, double constant) {
  validate(params);
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("envelope requires lambda in (0, 1]");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("envelope requires eta in (0, 1)");
  if (!(s >= 0.0 && s <= 0.5)) throw DomainError("norm index s must lie in [0, 1/2]");
  const double nd = static_cast<double>(n);
  const double eff = effective_dimension(params.profile, lambda);
  const double log_term = std::log(8.0 / eta);

  Envelope env;
  env.bias_term = params.R * (std::pow(lambda, params.r) + 1.0 / std::sqrt(nd));
  env.bernstein_term = params.M / (nd * lambda);
  env.variance_term = std::sqrt(params.sigma * params.sigma * eff / (nd * lambda));
  env.bound = constant * log_term * std::pow(lambda, s) *
              (env.bias_term + env.bernstein_term + env.variance_term);
  env.admissible_n = 64.0 / lambda * std::max(eff, 1.0) * log_term * log_term;
  env.admissible = nd >= env.admissible_n;
  env.qualified = filter.constants().qualification >= params.r + s;
  return env;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs >= 2 points");
  const double m = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

RateReport run_rate_experiment(const MercerProblem& problem, const FilterFamily& filter,
                               const RateConfig& config) {
  if (config.n_grid.empty()) throw ConfigError("rate experiment needs a nonempty n grid");
  if (config.replicates < 20) throw ConfigError("rate experiment needs at least 20 replicates");
  for (std::size_t i = 1; i < config.n_grid.size(); ++i)
    if (config.n_grid[i] <= config.n_grid[i - 1])
      throw ConfigError("n grid must be strictly increasing");
  if (config.n_grid.front() < 1) throw ConfigError("n grid entries must be >= 1");

  const ModelParams params = model_params(problem);
  RateReport report;
  const double needed_q = params.r + config.s;
  const double q_candidates[] = {needed_q};
  auto qual = measure_qualification(filter, q_candidates, 200);
  if (qual.front().saturates || filter.constants().qualification < needed_q) {
    std::ostringstream msg;
    msg << "filter " << to_string(filter.kind()) << " may lack qualification q >= r + s = "
        << needed_q;
    report.warnings.push_back(msg.str());
  }

  const std::size_t grid = config.n_grid.size();
  const std::size_t reps = config.replicates;
  std::vector<double> lambdas(grid);
  for (std::size_t i = 0; i < grid; ++i) lambdas[i] = lambda_rule(params, config.n_grid[i]);

  std::vector<double> errors(grid * reps);
  parallel_for(grid * reps, config.jobs, [&](std::size_t task) {
    const std::size_t i = task / reps;
    const std::size_t k = task % reps;
    Dataset data = sample(problem, config.n_grid[i], derive_seed(config.seed, i, k));
    auto coeffs = fit_coefficients(problem, data, lambdas[i], filter);
    errors[task] = error_norm(problem, coeffs, config.s);
  });

  std::vector<double> ns;
  std::vector<double> medians;
  std::vector<double> theo;
  for (std::size_t i = 0; i < grid; ++i) {
    RateRow row;
    row.n = config.n_grid[i];
    row.lambda = lambdas[i];
    row.theoretical_rate = theoretical_rate(params, row.n, config.s);
    row.errors.assign(errors.begin() + static_cast<std::ptrdiff_t>(i * reps),
                      errors.begin() + static_cast<std::ptrdiff_t>((i + 1) * reps));
    row.mean = std::accumulate(row.errors.begin(), row.errors.end(), 0.0) /
               static_cast<double>(reps);
    row.median = quantile(row.errors, 0.5);
    row.q10 = quantile(row.errors, 0.1);
    row.q90 = quantile(row.errors, 0.9);
    ns.push_back(static_cast<double>(row.n));
    medians.push_back(row.median);
    theo.push_back(row.theoretical_rate);
    report.rows.push_back(std::move(row));
  }
  if (grid >= 2) {
    report.fitted_slope = loglog_slope(ns, medians);
    report.theoretical_slope = loglog_slope(ns, theo);
  }
  return report;
}

std::vector<double> lambda_sweep_median_errors(const MercerProblem& problem,
                                               const FilterFamily& filter, std::size_t n,
                                               std::span<const double> lambdas,
                                               std::size_t replicates, double s,
                                               std::uint64_t seed, unsigned jobs) {
  if (lambdas.empty() || replicates == 0) throw ConfigError("lambda sweep needs lambdas and replicates");
  const std::size_t m = lambdas.size();
  std::vector<double> errors(replicates * m);
  parallel_for(replicates, jobs, [&](std::size_t k) {
    Dataset data = sample(problem, n, derive_seed(seed, k));
    SpectralPath path(problem, data);
    for (std::size_t j = 0; j < m; ++j)
      errors[k * m + j] = error_norm(problem, path.coefficients(filter, lambdas[j]), s);
  });
  std::vector<double> medians(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> column(replicates);
    for (std::size_t k = 0; k < replicates; ++k) column[k] = errors[k * m + j];
    medians[j] = quantile(std::move(column), 0.5);
  }
  return medians;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo) || count < 1) throw DomainError("invalid geometric grid");
  if (count == 1) return {lo};
  std::vector<double> grid(count);
  const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo * std::exp(ratio * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

bool monotone_within(const RateReport& report, double tolerance) {
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].median > (1.0 + tolerance) * report.rows[i - 1].median) return false;
  return true;
}

HoldoutResult holdout_select(const MercerProblem& problem, const Dataset& data,
                             std::span<const double> lambda_grid, const FilterFamily& filter,
                             double split_fraction) {
  if (lambda_grid.empty()) throw ConfigError("holdout needs a nonempty lambda grid");
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw ConfigError("split fraction must lie in (0, 1)");
  if (data.x.size() != data.y.size()) throw ShapeError("dataset x and y lengths differ");
  const auto n = data.x.size();
  const auto n_train = static_cast<std::size_t>(std::floor(split_fraction * static_cast<double>(n)));
  if (n_train < 2 || n - n_train < 2) throw ConfigError("holdout needs at least 2 points per split");

  Dataset train;
  train.seed = data.seed;
  train.x.assign(data.x.begin(), data.x.begin() + static_cast<std::ptrdiff_t>(n_train));
  train.y.assign(data.y.begin(), data.y.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::span<const double> x_hold(data.x.data() + n_train, n - n_train);
  Eigen::MatrixXd hold_features = feature_matrix(problem, x_hold);

  SpectralPath path(problem, train);
  HoldoutResult result;
  double best = std::numeric_limits<double>::infinity();
  for (double lambda : lambda_grid) {
    auto coeffs = path.coefficients(filter, lambda);
    Eigen::VectorXd pred =
        hold_features * Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
    double mse = 0.0;
    for (std::size_t i = 0; i < x_hold.size(); ++i) {
      double r = pred(static_cast<Eigen::Index>(i)) - data.y[n_train + i];
      mse += r * r;
    }
    mse /= static_cast<double>(x_hold.size());
    result.table.push_back({lambda, mse});
    if (mse < best || (mse == best && lambda > result.lambda_hat)) {
      best = mse;
      result.lambda_hat = lambda;
      result.coefficients = std::move(coeffs);
    }
  }
  return result;
}

std::string rates_csv(const RateReport& report, const std::vector<std::string>& comments) {
  CsvWriter csv({"n", "lambda", "theo_rate", "mean_err", "median_err", "q10", "q90"}, comments);
  for (const auto& row : report.rows)
    csv.row({std::to_string(row.n), format_real(row.lambda), format_real(row.theoretical_rate),
             format_real(row.mean), format_real(row.median), format_real(row.q10),
             format_real(row.q90)});
  return csv.str();
}

std::string slopes_csv(const RateReport& report, const std::vector<std::string>& comments) {
  CsvWriter csv({"quantity", "fitted", "theoretical", "gap"}, comments);
  csv.row({"error", format_real(report.fitted_slope), format_real(report.theoretical_slope),
           format_real(report.fitted_slope - report.theoretical_slope)});
  csv.row({"squared_error", format_real(2.0 * report.fitted_slope),
           format_real(2.0 * report.theoretical_slope),
           format_real(2.0 * (report.fitted_slope - report.theoretical_slope))});
  return csv.str();
}

std::string rates_svg(const RateReport& report) {
  constexpr double width = 640.0;
  constexpr double height = 420.0;
  constexpr double margin = 60.0;
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& row : report.rows) {
    double lx = std::log10(static_cast<double>(row.n));
    xmin = std::min(xmin, lx);
    xmax = std::max(xmax, lx);
    for (double v : {row.median, row.theoretical_rate, row.q10, row.q90}) {
      if (v <= 0.0) continue;
      ymin = std::min(ymin, std::log10(v));
      ymax = std::max(ymax, std::log10(v));
    }
  }
  if (report.rows.empty()) xmin = xmax = ymin = ymax = 0.0;
  if (xmax - xmin < 1e-9) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-9) ymax = ymin + 1.0;
  auto px = [&](double lx) { return margin + (lx - xmin) / (xmax - xmin) * (width - 2 * margin); };
  auto py = [&](double ly) { return height - margin - (ly - ymin) / (ymax - ymin) * (height - 2 * margin); };

  std::ostringstream svg;
  svg.setf(std::ios::fixed);
  svg.precision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\">\n";
  svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
      << "\" height=\"" << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto polyline = [&](auto value, const char* color, const char* dash) {
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-dasharray=\"" << dash
        << "\" points=\"";
    for (const auto& row : report.rows) {
      double v = value(row);
      if (v > 0.0) svg << px(std::log10(static_cast<double>(row.n))) << ',' << py(std::log10(v)) << ' ';
    }
    svg << "\"/>\n";
  };
  polyline([](const RateRow& r) { return r.median; }, "steelblue", "none");
  polyline([](const RateRow& r) { return r.q10; }, "lightsteelblue", "4 2");
  polyline([](const RateRow& r) { return r.q90; }, "lightsteelblue", "4 2");
  polyline([](const RateRow& r) { return r.theoretical_rate; }, "firebrick", "6 3");
  svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\" font-size=\"13\">log10 n</text>\n";
  svg << "<text x=\"15\" y=\"" << height / 2
      << "\" font-size=\"13\" transform=\"rotate(-90 15 " << height / 2
      << ")\" text-anchor=\"middle\">log10 error</text>\n";
  svg << "<text x=\"" << margin + 10 << "\" y=\"" << margin + 18
      << "\" font-size=\"12\" fill=\"steelblue\">median (slope " << report.fitted_slope
      << ")</text>\n";
  svg << "<text x=\"" << margin + 10 << "\" y=\"" << margin + 34
      << "\" font-size=\"12\" fill=\"firebrick\">theoretical (slope " << report.theoretical_slope
      << ")</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace specreg
