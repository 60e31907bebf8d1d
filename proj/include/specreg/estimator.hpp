#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specreg/filters.hpp"
#include "specreg/mercer.hpp"

namespace specreg {

struct FitResult {
  Eigen::VectorXd alpha;  // f(.) = sum_j alpha_j k(x_j, .)
  double lambda = 0.0;
  FilterFamily filter = FilterFamily::tikhonov();
  double kappa_sq = 1.0;
  std::vector<double> eigencoeffs;  // H-ONB coefficients, filled when a problem is known
};

struct FitOptions {
  // Adds 1e-12 * trace(K) to the diagonal before decomposing. Off by default.
  bool jitter = false;
};

// K_ij = k(x_i, x_j), exactly symmetric.
Eigen::MatrixXd gram(const MercerProblem& problem, std::span<const double> x);

// Eigendecomposition of the normalized Gram matrix K / (n kappa^2), kept so that several
// (filter, lambda) pairs can be applied to one dataset.
class DualSpectralFit {
 public:
  DualSpectralFit(const Eigen::MatrixXd& K, std::span<const double> y, double kappa_sq,
                  FitOptions options = {});

  Eigen::VectorXd alpha(const FilterFamily& filter, double lambda) const;
  const Eigen::VectorXd& normalized_eigenvalues() const { return theta_; }

 private:
  Eigen::MatrixXd U_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd projected_y_;  // U^T y
  double scale_;                 // n kappa^2
};

// Same estimator computed in feature space: B_x = Phi^T Phi / (n kappa^2) is p x p, so this
// route is cheaper than the dual one once n exceeds p. Returns H-ONB coefficients directly.
class PrimalSpectralFit {
 public:
  PrimalSpectralFit(const Eigen::MatrixXd& features, std::span<const double> y, double kappa_sq);

  std::vector<double> coefficients(const FilterFamily& filter, double lambda) const;

 private:
  Eigen::MatrixXd V_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd projected_;  // V^T Phi^T y / (n kappa^2)
};

// Estimator on one dataset of a MercerProblem, evaluated for any (filter, lambda). Uses the
// dual route for n <= p and the primal route otherwise; both give the same coefficients.
class SpectralPath {
 public:
  SpectralPath(const MercerProblem& problem, const Dataset& data);

  std::vector<double> coefficients(const FilterFamily& filter, double lambda) const;
  bool uses_dual() const { return dual_.has_value(); }

 private:
  Eigen::MatrixXd features_;
  std::optional<DualSpectralFit> dual_;
  std::optional<PrimalSpectralFit> primal_;
};

// alpha = (n kappa^2)^-1 U g_lambda(theta) U^T y. For tikhonov this is (K + n kappa^2 lambda I)^-1 y.
FitResult fit(const Eigen::MatrixXd& K, std::span<const double> y, double lambda,
              const FilterFamily& filter, double kappa_sq, FitOptions options = {});

// fhat_l = sqrt(mu_l) sum_j alpha_j e_l(x_j).
std::vector<double> eigencoeffs(const MercerProblem& problem, std::span<const double> x,
                                const Eigen::VectorXd& alpha);

// Spectral estimate in H-ONB coefficients, choosing the cheaper route (dual for n <= p).
std::vector<double> fit_coefficients(const MercerProblem& problem, const Dataset& data,
                                     double lambda, const FilterFamily& filter);

// Dual-form prediction sum_j alpha_j k(x_j, x).
double predict(const MercerProblem& problem, std::span<const double> x_train,
               const Eigen::VectorXd& alpha, double x);

std::string fit_csv(const FitResult& result, std::size_t n, std::uint64_t seed,
                    const std::vector<std::string>& comments = {});

}  // namespace specreg
