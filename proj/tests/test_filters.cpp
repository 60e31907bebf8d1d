#include <doctest.h>

#include <cmath>
#include <vector>

#include "specreg/errors.hpp"
#include "specreg/filters.hpp"

using namespace specreg;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
  return out;
}

// Direct geometric partial sum step * sum_{i<m} (1 - step t)^i.
double landweber_sum(double step, unsigned m, double t) {
  double sum = 0.0;
  double term = 1.0;
  for (unsigned i = 0; i < m; ++i) {
    sum += term;
    term *= 1.0 - step * t;
  }
  return step * sum;
}

}  // namespace

TEST_CASE("g_value and r_value examples") {
  auto tik = FilterFamily::tikhonov();
  CHECK(g_value(tik, 0.1, 0.1) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(r_value(tik, 0.1, 0.1) == doctest::Approx(0.5).epsilon(1e-15));

  auto cut = FilterFamily::spectral_cutoff();
  CHECK(g_value(cut, 0.5, 0.25) == 0.0);
  CHECK(r_value(cut, 0.5, 0.25) == 1.0);
  // Inclusive threshold: r(lambda) = 0.
  CHECK(r_value(cut, 0.5, 0.5) == 0.0);

  auto lw = FilterFamily::landweber(1.0);
  CHECK(landweber_iterations(0.5) == 2);
  CHECK(g_value(lw, 0.5, 0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(r_value(lw, 0.5, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("domain errors") {
  auto tik = FilterFamily::tikhonov();
  CHECK_THROWS_AS(g_value(tik, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(g_value(tik, 1.5, 0.5), DomainError);
  CHECK_THROWS_AS(g_value(tik, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(r_value(tik, 0.5, 1.1), DomainError);
  CHECK_THROWS_AS(FilterFamily::landweber(1.5), DomainError);
  CHECK_THROWS_AS(FilterFamily::iterated_tikhonov(0), DomainError);
}

TEST_CASE("closed forms against direct formulas") {
  const auto ls = grid(1e-4, 1.0, 40);
  auto it3 = FilterFamily::iterated_tikhonov(3);
  auto it1 = FilterFamily::iterated_tikhonov(1);
  auto tik = FilterFamily::tikhonov();
  for (double step : {1.0, 0.5}) {
    auto lw = FilterFamily::landweber(step);
    for (double lambda : grid(1e-2, 1.0, 15))
      for (double t : ls) {
        unsigned m = landweber_iterations(lambda);
        CHECK(g_value(lw, lambda, t) == doctest::Approx(landweber_sum(step, m, t)).epsilon(1e-12));
        CHECK(r_value(lw, lambda, t) ==
              doctest::Approx(std::pow(1.0 - step * t, m)).epsilon(1e-10).scale(1.0));
      }
  }
  for (double lambda : ls)
    for (double t : ls) {
      CHECK(g_value(tik, lambda, t) == doctest::Approx(g_value(it1, lambda, t)).epsilon(1e-13));
      double ratio = lambda / (t + lambda);
      double direct = (1.0 - ratio * ratio * ratio) / t;
      CHECK(g_value(it3, lambda, t) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("r + t g = 1 at every grid point") {
  const auto ls = grid(1e-6, 1.0, 60);
  for (auto f : {FilterFamily::tikhonov(), FilterFamily::spectral_cutoff(), FilterFamily::landweber(),
                 FilterFamily::iterated_tikhonov(4)})
    for (double lambda : ls)
      for (double t : ls) {
        CHECK(std::abs(r_value(f, lambda, t) + t * g_value(f, lambda, t) - 1.0) <= 1e-15);
        CHECK(std::abs(f.residual(lambda, t) - r_value(f, lambda, t)) <= 1e-10);
      }
}

TEST_CASE("landweber approaches spectral inversion") {
  auto lw = FilterFamily::landweber();
  for (double t : {0.05, 0.3, 0.9}) {
    double prev = INFINITY;
    for (double lambda : {1e-1, 1e-2, 1e-3, 1e-4}) {
      double gap = std::abs(g_value(lw, lambda, t) - 1.0 / t);
      CHECK(gap <= prev);
      prev = gap;
    }
    CHECK(prev < 1e-6 / t);
  }
}

TEST_CASE("verify_constants on the default table") {
  for (auto f : {FilterFamily::tikhonov(), FilterFamily::spectral_cutoff(), FilterFamily::landweber(),
                 FilterFamily::iterated_tikhonov(2), FilterFamily::iterated_tikhonov(4)}) {
    auto rep = verify_constants(f, 1000);
    CHECK_MESSAGE(rep.holds, to_string(f.kind()));
    CHECK(rep.conditions.size() == 4);
  }
}

TEST_CASE("verify_constants rejects an understated constant") {
  FilterConstants c;
  c.D = 0.5;
  auto rep = verify_constants(FilterFamily::tikhonov().with_constants(c), 1000);
  CHECK_FALSE(rep.holds);
  const auto& d = rep.conditions[0];
  CHECK(d.condition == "D");
  CHECK_FALSE(d.holds);
  CHECK(d.worst_t == doctest::Approx(1.0));
  CHECK(d.worst_lambda < 1e-5);
  CHECK(rep.D_hat == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("measure_qualification") {
  const std::vector<double> q12{1.0, 2.0};
  auto tik = measure_qualification(FilterFamily::tikhonov(), q12, 300);
  CHECK(tik[0].gamma_q_hat <= 1.0);
  CHECK_FALSE(tik[0].saturates);
  CHECK(tik[1].saturates);

  const std::vector<double> q124{1.0, 2.0, 4.0};
  for (auto f : {FilterFamily::landweber(), FilterFamily::spectral_cutoff()}) {
    for (const auto& res : measure_qualification(f, q124, 300)) {
      CHECK_FALSE(res.saturates);
      CHECK(res.refinement_sups.size() == 3);
    }
  }
}

TEST_CASE("constants report CSV layout") {
  auto csv = constants_report_csv(verify_constants(FilterFamily::tikhonov(), 1000));
  CHECK(csv.rfind("condition,declared,measured,worst_lambda,worst_t\n", 0) == 0);
  CHECK(csv.find("\ngamma_q,") != std::string::npos);
}

TEST_CASE("unchecked evaluation at t = 0 gives the finite limit") {
  CHECK(FilterFamily::tikhonov().g(0.2, 0.0) == doctest::Approx(5.0));
  CHECK(FilterFamily::spectral_cutoff().g(0.2, 0.0) == 0.0);
  CHECK(FilterFamily::landweber(0.5).g(0.2, 0.0) == doctest::Approx(0.5 * 5));
  CHECK(FilterFamily::iterated_tikhonov(3).g(0.2, 0.0) == doctest::Approx(15.0));
  CHECK(FilterFamily::iterated_tikhonov(3).g(0.2, 1e-9) == doctest::Approx(15.0).epsilon(1e-6));
}
