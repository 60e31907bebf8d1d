#include "specreg/mercer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "specreg/errors.hpp"
#include "specreg/parallel.hpp"
#include "specreg/report_io.hpp"

namespace specreg {
namespace {

constexpr std::size_t kKappaGrid = 10000;
constexpr double kKappaSafety = 1.01;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double kappa_sq_bound(const SpectrumProfile& profile, BasisKind basis) {
  auto mu = profile.eigenvalues();
  // |e_1| = 1 and |e_l| <= sqrt2 otherwise.
  double analytic = mu[0];
  for (std::size_t l = 1; l < mu.size(); ++l) analytic += 2.0 * mu[l];

  std::vector<double> row(mu.size());
  double grid_max = 0.0;
  for (std::size_t i = 0; i < kKappaGrid; ++i) {
    double x = static_cast<double>(i) / static_cast<double>(kKappaGrid - 1);
    basis_row(basis, x, row);
    double diag = 0.0;
    for (std::size_t l = 0; l < mu.size(); ++l) diag += mu[l] * row[l] * row[l];
    grid_max = std::max(grid_max, diag);
  }
  return std::min(analytic, kKappaSafety * grid_max);
}

}  // namespace

void validate(const SourceParams& source) {
  if (!(source.r > 0.0)) throw DomainError("source exponent r must be positive");
  if (!(source.R > 0.0)) throw DomainError("source radius R must be positive");
  if (!(source.s >= 0.0 && source.s <= 0.5)) throw DomainError("norm index s must lie in [0, 1/2]");
}

std::string to_string(BasisKind kind) {
  return kind == BasisKind::fourier_unit_interval ? "fourier" : "abstract_orthonormal";
}

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "fourier" || name == "fourier_unit_interval") return BasisKind::fourier_unit_interval;
  if (name == "abstract_orthonormal") return BasisKind::abstract_orthonormal;
  throw ConfigError("unknown basis '" + name + "'");
}

double basis_eval(BasisKind basis, std::size_t l, double x) {
  if (l < 1) throw RangeError("basis index starts at 1");
  if (l == 1) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (basis == BasisKind::abstract_orthonormal)
    return std::numbers::sqrt2 * std::cos(pi * static_cast<double>(l - 1) * x);
  double k = static_cast<double>(l / 2);
  return l % 2 == 0 ? std::numbers::sqrt2 * std::cos(2.0 * pi * k * x)
                    : std::numbers::sqrt2 * std::sin(2.0 * pi * k * x);
}

void basis_row(BasisKind basis, double x, std::span<double> out) {
  for (std::size_t l = 1; l <= out.size(); ++l) out[l - 1] = basis_eval(basis, l, x);
}

double NoiseModel::sigma() const {
  return kind == Kind::gaussian ? scale : scale / std::sqrt(3.0);
}

double NoiseModel::bernstein_M() const { return scale; }

std::vector<double> default_source_coeffs(const SpectrumProfile& profile, double R, double rho) {
  if (!(rho >= 0.0)) throw DomainError("edge-of-class control rho must be >= 0");
  auto mu = profile.eigenvalues();
  std::vector<double> g(mu.size());
  double norm_sq = 0.0;
  for (std::size_t l = 0; l < mu.size(); ++l) {
    g[l] = std::pow(mu[l], rho) * (l % 2 == 0 ? 1.0 : -1.0);
    norm_sq += g[l] * g[l];
  }
  const double scale = R / std::sqrt(norm_sq);
  for (double& v : g) v *= scale;
  return g;
}

MercerProblem::MercerProblem(SpectrumProfile profile, BasisKind basis, SourceParams source,
                             std::vector<double> g_coeffs, NoiseModel noise)
    : profile_(std::move(profile)),
      basis_(basis),
      source_(source),
      g_(std::move(g_coeffs)),
      noise_(noise) {
  validate(source_);
  if (g_.size() != profile_.size())
    throw ShapeError("source coefficients must have length p");
  if (!(noise_.scale >= 0.0)) throw DomainError("noise scale must be nonnegative");
  double norm_sq = 0.0;
  for (double v : g_) norm_sq += v * v;
  // Relative slack of a few ulps for generated boundary elements with ||g|| = R.
  if (norm_sq > source_.R * source_.R * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "source element has ||g||_H = " << std::sqrt(norm_sq) << " > R = " << source_.R;
    throw ConstructionError(msg.str());
  }
  auto mu = profile_.eigenvalues();
  target_.resize(g_.size());
  for (std::size_t l = 0; l < g_.size(); ++l) target_[l] = std::pow(mu[l], source_.r) * g_[l];
  kappa_sq_ = kappa_sq_bound(profile_, basis_);
}

MercerProblem MercerProblem::with_default_source(SpectrumProfile profile, BasisKind basis,
                                                 SourceParams source, double rho,
                                                 NoiseModel noise) {
  auto g = default_source_coeffs(profile, source.R, rho);
  return MercerProblem(std::move(profile), basis, source, std::move(g), noise);
}

double kernel_eval(const MercerProblem& problem, double x, double xp) {
  auto mu = problem.profile().eigenvalues();
  std::vector<double> a(mu.size());
  std::vector<double> b(mu.size());
  basis_row(problem.basis(), x, a);
  basis_row(problem.basis(), xp, b);
  double k = 0.0;
  for (std::size_t l = 0; l < mu.size(); ++l) k += mu[l] * a[l] * b[l];
  return k;
}

double synthesize(const MercerProblem& problem, std::span<const double> coeffs, double x) {
  auto mu = problem.profile().eigenvalues();
  if (coeffs.size() != mu.size()) throw ShapeError("coefficient vector must have length p");
  std::vector<double> e(mu.size());
  basis_row(problem.basis(), x, e);
  double f = 0.0;
  for (std::size_t l = 0; l < mu.size(); ++l) f += coeffs[l] * std::sqrt(mu[l]) * e[l];
  return f;
}

double target_eval(const MercerProblem& problem, double x) {
  return synthesize(problem, problem.target_coeffs(), x);
}

Dataset sample(const MercerProblem& problem, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample size must be >= 1");
  Dataset data;
  data.seed = seed;
  data.x.resize(n);
  data.y.resize(n);
  std::mt19937_64 input_rng(derive_seed(seed, 0));
  std::mt19937_64 noise_rng(derive_seed(seed, 1));
  for (std::size_t i = 0; i < n; ++i) data.x[i] = uniform01(input_rng);

  const auto& noise = problem.noise();
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double eps = 0.0;
    if (noise.kind == NoiseModel::Kind::gaussian)
      eps = noise.scale * normal(noise_rng);
    else
      eps = noise.scale * (2.0 * uniform01(noise_rng) - 1.0);
    data.y[i] = target_eval(problem, data.x[i]) + eps;
  }
  return data;
}

double error_norm(const MercerProblem& problem, std::span<const double> fhat, double s) {
  const auto& target = problem.target_coeffs();
  if (fhat.size() != target.size()) throw ShapeError("fhat must have length p");
  if (!(s >= 0.0 && s <= 0.5)) throw DomainError("norm index s must lie in [0, 1/2]");
  auto mu = problem.profile().eigenvalues();
  double sum = 0.0;
  for (std::size_t l = 0; l < target.size(); ++l) {
    double diff = target[l] - fhat[l];
    sum += std::pow(mu[l], 2.0 * s) * diff * diff;
  }
  return std::sqrt(sum);
}

Eigen::MatrixXd feature_matrix(const MercerProblem& problem, std::span<const double> x) {
  auto mu = problem.profile().eigenvalues();
  const auto p = static_cast<Eigen::Index>(mu.size());
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(x.size()), p);
  std::vector<double> sqrt_mu(mu.size());
  for (std::size_t l = 0; l < mu.size(); ++l) sqrt_mu[l] = std::sqrt(mu[l]);
  std::vector<double> e(mu.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    basis_row(problem.basis(), x[i], e);
    for (Eigen::Index l = 0; l < p; ++l)
      phi(static_cast<Eigen::Index>(i), l) = sqrt_mu[static_cast<std::size_t>(l)] * e[static_cast<std::size_t>(l)];
  }
  return phi;
}

std::string dataset_csv(const Dataset& data, const std::vector<std::string>& comments) {
  CsvWriter csv({"x", "y"}, comments);
  for (std::size_t i = 0; i < data.x.size(); ++i) csv.row({data.x[i], data.y[i]});
  return csv.str();
}

}  // namespace specreg
