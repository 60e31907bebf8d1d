#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specreg/spectrum.hpp"

namespace specreg {

// Source condition f* = B^r g with ||g||_H <= R; s selects the error norm ||B^s .||_H.
struct SourceParams {
  double r = 0.5;
  double R = 1.0;
  double s = 0.5;
};

void validate(const SourceParams& source);

// Orthonormal systems in L2(uniform[0,1]).
//   fourier: e_1 = 1, e_2k = sqrt2 cos(2 pi k x), e_2k+1 = sqrt2 sin(2 pi k x)
//   abstract_orthonormal: cosine system e_1 = 1, e_l = sqrt2 cos(pi (l-1) x)
enum class BasisKind { fourier_unit_interval, abstract_orthonormal };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

double basis_eval(BasisKind basis, std::size_t l, double x);
// out[l-1] = e_l(x) for l = 1..out.size().
void basis_row(BasisKind basis, double x, std::span<double> out);

struct NoiseModel {
  enum class Kind { gaussian, bounded_uniform };
  Kind kind = Kind::gaussian;
  double scale = 0.0;  // sigma for gaussian, half width for bounded_uniform

  static NoiseModel gaussian(double sigma) { return {Kind::gaussian, sigma}; }
  static NoiseModel bounded_uniform(double half_width) { return {Kind::bounded_uniform, half_width}; }

  // Bernstein pair (sigma, M): gaussian (sigma, sigma), uniform[-h, h] (h / sqrt3, h).
  double sigma() const;
  double bernstein_M() const;
};

// Default source element g_l = R mu_l^rho z_l / ||mu^rho z||, z_l = +1, -1, +1, ...
std::vector<double> default_source_coeffs(const SpectrumProfile& profile, double R, double rho);

// Synthetic regression problem with kernel k(x, x') = sum_l mu_l e_l(x) e_l(x') and target
// f* = B^r g. All coefficient vectors are taken in the H-orthonormal basis phi_l = sqrt(mu_l) e_l.
class MercerProblem {
 public:
  MercerProblem(SpectrumProfile profile, BasisKind basis, SourceParams source,
                std::vector<double> g_coeffs, NoiseModel noise);

  static MercerProblem with_default_source(SpectrumProfile profile, BasisKind basis,
                                           SourceParams source, double rho, NoiseModel noise);

  const SpectrumProfile& profile() const { return profile_; }
  BasisKind basis() const { return basis_; }
  const SourceParams& source() const { return source_; }
  std::size_t size() const { return profile_.size(); }
  const std::vector<double>& g_coeffs() const { return g_; }
  const std::vector<double>& target_coeffs() const { return target_; }
  const NoiseModel& noise() const { return noise_; }
  double M() const { return noise_.bernstein_M(); }
  double kappa_sq() const { return kappa_sq_; }

 private:
  SpectrumProfile profile_;
  BasisKind basis_;
  SourceParams source_;
  std::vector<double> g_;
  std::vector<double> target_;
  NoiseModel noise_;
  double kappa_sq_ = 0.0;
};

struct Dataset {
  std::vector<double> x;
  std::vector<double> y;
  std::uint64_t seed = 0;
};

double kernel_eval(const MercerProblem& problem, double x, double xp);
double target_eval(const MercerProblem& problem, double x);

// Evaluate a function given by H-ONB coefficients at x.
double synthesize(const MercerProblem& problem, std::span<const double> coeffs, double x);

// x_i ~ uniform[0, 1], y_i = f*(x_i) + eps_i. Inputs and noise use separate derived streams.
Dataset sample(const MercerProblem& problem, std::size_t n, std::uint64_t seed);

// sqrt(sum_l mu_l^(2s) (a*_l - fhat_l)^2); s = 0 is the H norm, s = 1/2 the L2(nu) norm.
double error_norm(const MercerProblem& problem, std::span<const double> fhat, double s);

// n x p matrix of feature coordinates: Phi(i, l) = sqrt(mu_l) e_l(x_i).
Eigen::MatrixXd feature_matrix(const MercerProblem& problem, std::span<const double> x);

std::string dataset_csv(const Dataset& data, const std::vector<std::string>& comments = {});

}  // namespace specreg
