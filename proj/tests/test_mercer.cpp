#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "specreg/errors.hpp"
#include "specreg/mercer.hpp"

using namespace specreg;

namespace {

MercerProblem small_problem(BasisKind basis = BasisKind::fourier_unit_interval,
                            NoiseModel noise = NoiseModel::gaussian(0.1)) {
  auto prof = SpectrumProfile::polynomial(2.0, 21, {1, 2.0, 2.0});
  return MercerProblem::with_default_source(prof, basis, {0.5, 1.0, 0.5}, 0.5, noise);
}

// Midpoint rule on [0, 1]; exact for trigonometric polynomials of degree < points.
template <class Fn>
double integrate(Fn f, int points = 4096) {
  double sum = 0.0;
  for (int i = 0; i < points; ++i) sum += f((i + 0.5) / points);
  return sum / points;
}

}  // namespace

TEST_CASE("bases are orthonormal in L2[0,1]") {
  for (auto basis : {BasisKind::fourier_unit_interval, BasisKind::abstract_orthonormal}) {
    for (std::size_t a = 1; a <= 9; ++a)
      for (std::size_t b = 1; b <= 9; ++b) {
        double ip = integrate([&](double x) { return basis_eval(basis, a, x) * basis_eval(basis, b, x); });
        CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
      }
  }
  CHECK(basis_eval(BasisKind::fourier_unit_interval, 2, 0.25) == doctest::Approx(0.0).scale(1.0));
  CHECK(basis_eval(BasisKind::fourier_unit_interval, 3, 0.25) == doctest::Approx(std::numbers::sqrt2));
  CHECK_THROWS_AS(basis_eval(BasisKind::fourier_unit_interval, 0, 0.5), RangeError);
}

TEST_CASE("kernel is the Mercer sum and bounded by kappa^2") {
  auto prob = small_problem();
  auto mu = prob.profile().eigenvalues();
  for (double x : {0.0, 0.13, 0.5, 0.77})
    for (double xp : {0.2, 0.9}) {
      double direct = 0.0;
      for (std::size_t l = 1; l <= mu.size(); ++l)
        direct += mu[l - 1] * basis_eval(prob.basis(), l, x) * basis_eval(prob.basis(), l, xp);
      CHECK(kernel_eval(prob, x, xp) == doctest::Approx(direct).epsilon(1e-14));
      CHECK(kernel_eval(prob, x, xp) == doctest::Approx(kernel_eval(prob, xp, x)).epsilon(1e-14));
    }
  for (int i = 0; i <= 1000; ++i) {
    double x = i / 1000.0;
    CHECK(kernel_eval(prob, x, x) <= prob.kappa_sq());
  }
  double trace_bound = mu[0];
  for (std::size_t l = 1; l < mu.size(); ++l) trace_bound += 2.0 * mu[l];
  CHECK(prob.kappa_sq() <= trace_bound * (1.0 + 1e-14));
}

TEST_CASE("source and target coefficients") {
  auto prob = small_problem();
  auto mu = prob.profile().eigenvalues();
  double norm_sq = 0.0;
  for (double g : prob.g_coeffs()) norm_sq += g * g;
  CHECK(std::sqrt(norm_sq) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t l = 0; l < mu.size(); ++l)
    CHECK(prob.target_coeffs()[l] == doctest::Approx(std::sqrt(mu[l]) * prob.g_coeffs()[l]).epsilon(1e-14));

  std::vector<double> too_big(21, 0.0);
  too_big[0] = 1.5;
  CHECK_THROWS_AS(MercerProblem(prob.profile(), prob.basis(), {0.5, 1.0, 0.5}, too_big,
                                NoiseModel::gaussian(0.1)),
                  ConstructionError);
  CHECK_THROWS_AS(MercerProblem(prob.profile(), prob.basis(), {0.5, 1.0, 0.5}, {1.0},
                                NoiseModel::gaussian(0.1)),
                  ShapeError);
}

TEST_CASE("error norms match function-space norms") {
  auto prob = small_problem();
  std::vector<double> fhat(21);
  for (std::size_t l = 0; l < 21; ++l) fhat[l] = 0.01 * std::cos(static_cast<double>(l));

  // s = 1/2: L2(uniform) norm of the difference, by quadrature.
  std::vector<double> diff(21);
  for (std::size_t l = 0; l < 21; ++l) diff[l] = prob.target_coeffs()[l] - fhat[l];
  double l2 = std::sqrt(integrate([&](double x) {
    double v = synthesize(prob, diff, x);
    return v * v;
  }));
  CHECK(error_norm(prob, fhat, 0.5) == doctest::Approx(l2).epsilon(1e-12));

  // s = 0: Euclidean norm of H-ONB coefficients.
  double h = 0.0;
  for (double d : diff) h += d * d;
  CHECK(error_norm(prob, fhat, 0.0) == doctest::Approx(std::sqrt(h)).epsilon(1e-14));
  CHECK_THROWS_AS(error_norm(prob, fhat, 0.7), DomainError);
}

TEST_CASE("target evaluation") {
  auto prob = small_problem();
  auto mu = prob.profile().eigenvalues();
  for (double x : {0.1, 0.4, 0.95}) {
    double direct = 0.0;
    for (std::size_t l = 1; l <= 21; ++l)
      direct += prob.target_coeffs()[l - 1] * std::sqrt(mu[l - 1]) * basis_eval(prob.basis(), l, x);
    CHECK(target_eval(prob, x) == doctest::Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("sampling is seeded and has the right noise law") {
  auto prob = small_problem();
  auto a = sample(prob, 200, 42);
  auto b = sample(prob, 200, 42);
  auto c = sample(prob, 200, 43);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.x != c.x);

  const std::size_t n = 20000;
  auto big = sample(prob, n, 5);
  double mx = 0.0, me = 0.0, ve = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(big.x[i] >= 0.0);
    CHECK(big.x[i] < 1.0);
    mx += big.x[i];
    double e = big.y[i] - target_eval(prob, big.x[i]);
    me += e;
    ve += e * e;
  }
  mx /= n;
  me /= n;
  ve /= n;
  // 5 standard errors.
  CHECK(std::abs(mx - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(me) < 5.0 * 0.1 / std::sqrt(double(n)));
  CHECK(std::abs(ve - 0.01) < 5.0 * 0.01 * std::sqrt(2.0 / n));

  auto uprob = small_problem(BasisKind::fourier_unit_interval, NoiseModel::bounded_uniform(0.3));
  CHECK(uprob.noise().sigma() == doctest::Approx(0.3 / std::sqrt(3.0)));
  CHECK(uprob.M() == 0.3);
  auto u = sample(uprob, 5000, 9);
  double vu = 0.0;
  for (std::size_t i = 0; i < 5000; ++i) {
    double e = u.y[i] - target_eval(uprob, u.x[i]);
    CHECK(std::abs(e) <= 0.3);
    vu += e * e;
  }
  CHECK(vu / 5000 == doctest::Approx(0.03).epsilon(0.1));
}

TEST_CASE("feature matrix and dataset CSV") {
  auto prob = small_problem(BasisKind::abstract_orthonormal);
  std::vector<double> x{0.1, 0.6};
  auto phi = feature_matrix(prob, x);
  CHECK(phi.rows() == 2);
  CHECK(phi.cols() == 21);
  auto mu = prob.profile().eigenvalues();
  CHECK(phi(1, 4) == doctest::Approx(std::sqrt(mu[4]) * basis_eval(prob.basis(), 5, 0.6)));
  // Phi Phi^T reproduces the Gram matrix.
  CHECK((phi * phi.transpose())(0, 1) == doctest::Approx(kernel_eval(prob, 0.1, 0.6)).epsilon(1e-14));

  Dataset d{{0.5, 0.25}, {1.0, -2.0}, 3};
  auto csv = dataset_csv(d, {"hello"});
  CHECK(csv == "# hello\nx,y\n0.5,1\n0.25,-2\n");
}
