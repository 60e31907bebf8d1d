#include "specreg/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "specreg/errors.hpp"
#include "specreg/report_io.hpp"

namespace specreg {
namespace {

// Normalized eigenvalues at or below this fraction of the largest are treated as null
// directions and receive the finite limit g(0+).
constexpr double kNullThreshold = 1e-14;

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("fit requires lambda in (0, 1]");
}

Eigen::VectorXd filtered(const Eigen::VectorXd& theta, const FilterFamily& filter, double lambda) {
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(theta.size());
  const double cutoff = kNullThreshold * std::max(theta.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    double t = std::min(theta(i), 1.0);
    weights(i) = t > cutoff && t > 0.0 ? filter.g(lambda, t) : filter.g(lambda, 0.0);
  }
  return weights;
}

Eigen::VectorXd as_vector(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Eigen::MatrixXd gram(const MercerProblem& problem, std::span<const double> x) {
  Eigen::MatrixXd phi = feature_matrix(problem, x);
  const Eigen::Index n = phi.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  K.selfadjointView<Eigen::Lower>().rankUpdate(phi);
  K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
  return K;
}

DualSpectralFit::DualSpectralFit(const Eigen::MatrixXd& K, std::span<const double> y,
                                 double kappa_sq, FitOptions options) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n || n == 0) throw ShapeError("Gram matrix must be square and nonempty");
  if (static_cast<Eigen::Index>(y.size()) != n) throw ShapeError("y length must match Gram size");
  if (K != K.transpose()) throw ShapeError("Gram matrix is not symmetric");
  if (!(kappa_sq > 0.0)) throw DomainError("kappa_sq must be positive");
  scale_ = static_cast<double>(n) * kappa_sq;
  Eigen::MatrixXd normalized = K / scale_;
  if (options.jitter) normalized.diagonal().array() += 1e-12 * normalized.trace();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normalized);
  if (eig.info() != Eigen::Success) throw ConstructionError("Gram eigendecomposition failed");
  U_ = eig.eigenvectors();
  theta_ = eig.eigenvalues();
  projected_y_ = U_.transpose() * as_vector(y);
}

Eigen::VectorXd DualSpectralFit::alpha(const FilterFamily& filter, double lambda) const {
  check_lambda(lambda);
  Eigen::VectorXd w = filtered(theta_, filter, lambda);
  return U_ * (w.cwiseProduct(projected_y_)) / scale_;
}

PrimalSpectralFit::PrimalSpectralFit(const Eigen::MatrixXd& features, std::span<const double> y,
                                     double kappa_sq) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  if (n == 0 || p == 0) throw ShapeError("feature matrix must be nonempty");
  if (static_cast<Eigen::Index>(y.size()) != n) throw ShapeError("y length must match feature rows");
  if (!(kappa_sq > 0.0)) throw DomainError("kappa_sq must be positive");
  const double scale = static_cast<double>(n) * kappa_sq;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose(), 1.0 / scale);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);  // reads the lower triangle
  if (eig.info() != Eigen::Success) throw ConstructionError("covariance eigendecomposition failed");
  V_ = eig.eigenvectors();
  theta_ = eig.eigenvalues();
  projected_ = V_.transpose() * (features.transpose() * as_vector(y) / scale);
}

std::vector<double> PrimalSpectralFit::coefficients(const FilterFamily& filter,
                                                    double lambda) const {
  check_lambda(lambda);
  Eigen::VectorXd w = filtered(theta_, filter, lambda);
  Eigen::VectorXd c = V_ * w.cwiseProduct(projected_);
  return {c.data(), c.data() + c.size()};
}

FitResult fit(const Eigen::MatrixXd& K, std::span<const double> y, double lambda,
              const FilterFamily& filter, double kappa_sq, FitOptions options) {
  check_lambda(lambda);
  DualSpectralFit decomposition(K, y, kappa_sq, options);
  FitResult result;
  result.alpha = decomposition.alpha(filter, lambda);
  result.lambda = lambda;
  result.filter = filter;
  result.kappa_sq = kappa_sq;
  return result;
}

std::vector<double> eigencoeffs(const MercerProblem& problem, std::span<const double> x,
                                const Eigen::VectorXd& alpha) {
  if (static_cast<Eigen::Index>(x.size()) != alpha.size())
    throw ShapeError("alpha length must match the number of inputs");
  Eigen::VectorXd c = feature_matrix(problem, x).transpose() * alpha;
  return {c.data(), c.data() + c.size()};
}

SpectralPath::SpectralPath(const MercerProblem& problem, const Dataset& data)
    : features_(feature_matrix(problem, data.x)) {
  if (data.y.size() != data.x.size()) throw ShapeError("dataset x and y lengths differ");
  if (data.x.size() <= problem.size()) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(features_.rows(), features_.rows());
    K.selfadjointView<Eigen::Lower>().rankUpdate(features_);
    K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
    dual_.emplace(K, data.y, problem.kappa_sq());
  } else {
    primal_.emplace(features_, data.y, problem.kappa_sq());
  }
}

std::vector<double> SpectralPath::coefficients(const FilterFamily& filter, double lambda) const {
  if (primal_) return primal_->coefficients(filter, lambda);
  Eigen::VectorXd c = features_.transpose() * dual_->alpha(filter, lambda);
  return {c.data(), c.data() + c.size()};
}

std::vector<double> fit_coefficients(const MercerProblem& problem, const Dataset& data,
                                     double lambda, const FilterFamily& filter) {
  return SpectralPath(problem, data).coefficients(filter, lambda);
}

double predict(const MercerProblem& problem, std::span<const double> x_train,
               const Eigen::VectorXd& alpha, double x) {
  if (static_cast<Eigen::Index>(x_train.size()) != alpha.size())
    throw ShapeError("alpha length must match the number of inputs");
  double f = 0.0;
  for (std::size_t j = 0; j < x_train.size(); ++j)
    f += alpha(static_cast<Eigen::Index>(j)) * kernel_eval(problem, x_train[j], x);
  return f;
}

std::string fit_csv(const FitResult& result, std::size_t n, std::uint64_t seed,
                    const std::vector<std::string>& comments) {
  std::vector<std::string> header = comments;
  header.push_back("lambda=" + format_real(result.lambda) + " filter=" + to_string(result.filter.kind()) +
                   " kappa_sq=" + format_real(result.kappa_sq) + " n=" + std::to_string(n) +
                   " seed=" + std::to_string(seed));
  CsvWriter csv({"j", "alpha"}, header);
  for (Eigen::Index j = 0; j < result.alpha.size(); ++j)
    csv.row({std::to_string(j), format_real(result.alpha(j))});
  return csv.str();
}

}  // namespace specreg
