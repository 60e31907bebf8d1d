#include <doctest.h>

#include <cmath>
#include <string>

#include "specreg/errors.hpp"
#include "specreg/lowerbound.hpp"

using namespace specreg;

namespace {

ModelParams poly_params(std::size_t p, double sigma = 0.1) {
  auto prof = SpectrumProfile::polynomial(2.0, p, {1, 2.0, 2.0});
  return ModelParams{prof, 0.5, sigma, sigma, 1.0};
}

std::size_t count_lines(const std::string& s) {
  std::size_t k = 0;
  for (char c : s) k += c == '\n' ? 1 : 0;
  return k;
}

}  // namespace

TEST_CASE("hamming and required codes") {
  SignCode a{1, -1, 1, 1}, b{1, 1, -1, 1};
  CHECK(hamming(a, a) == 0);
  CHECK(hamming(a, b) == 2);
  CHECK_THROWS(hamming(a, SignCode{1}));
  CHECK(required_codes(36) == std::ceil(std::exp(1.0)) + 1.0);
  CHECK(required_codes(72) == 9.0);
}

TEST_CASE("packing generation and verification") {
  for (std::size_t m : {28, 40, 100, 200}) {
    auto pk = generate_packing(m, 3);
    CHECK(pk.m == m);
    CHECK(static_cast<double>(pk.codes.size()) >= required_codes(m));
    CHECK(verify_packing(pk).valid);
    std::size_t min_h = m;
    for (std::size_t i = 0; i < pk.codes.size(); ++i)
      for (std::size_t j = i + 1; j < pk.codes.size(); ++j) min_h = std::min(min_h, hamming(pk.codes[i], pk.codes[j]));
    CHECK(min_h == pk.min_hamming);
    CHECK(4 * min_h > m);
    CHECK(std::log(static_cast<double>(pk.codes.size() - 1)) >= static_cast<double>(m) / 36.0);
  }
  CHECK(generate_packing(60, 9).codes == generate_packing(60, 9).codes);
  CHECK_THROWS_AS(generate_packing(27, 1), DomainError);
  CHECK_THROWS_AS(generate_packing(2000, 1), ConstructionError);

  auto pk = generate_packing(40, 5);
  auto broken = pk;
  broken.codes[1] = broken.codes[0];
  CHECK_FALSE(verify_packing(broken).valid);
  auto short_pk = pk;
  short_pk.codes.resize(2);
  CHECK_FALSE(verify_packing(short_pk).valid);
}

TEST_CASE("choose_m threshold") {
  auto mp = poly_params(200);
  const double thr = epsilon_threshold(mp, 0.5);
  CHECK(thr == doctest::Approx(std::pow(2.0, -2.0) * std::pow(28.0, -2.0)));
  CHECK_THROWS_AS(choose_m(thr, mp, 0.5), DomainError);
  CHECK(choose_m(thr * (1 - 1e-9), mp, 0.5) >= 28);
  CHECK_THROWS_AS(choose_m(-1.0, mp, 0.5), DomainError);
  CHECK_THROWS_AS(choose_m(1e-3, mp, 0.7), DomainError);
  // t = 4 eps -> F(t) = floor(t^-1/2).
  CHECK(choose_m(1.0 / (4.0 * 1600.0), mp, 0.5) == 40);
}

TEST_CASE("alternatives: separation identity and KL") {
  auto mp = poly_params(400, 0.2);
  const double s = 0.5;
  const double eps = 1.0 / (4.0 * 1600.0) * (1 - 1e-12);
  const std::size_t m = choose_m(eps, mp, s);
  REQUIRE(m == 40);
  auto pk = generate_packing(m, 11);
  auto fam = build_alternatives(eps, mp, s, pk);
  CHECK(fam.fs.size() == pk.codes.size());
  for (std::size_t i = 0; i < pk.codes.size(); i += 3) {
    for (std::size_t j = i + 1; j < pk.codes.size(); j += 5) {
      double h = static_cast<double>(hamming(pk.codes[i], pk.codes[j]));
      CHECK(separation_sq(fam, i, j) == doctest::Approx(4.0 * eps * eps * h / m).epsilon(1e-12));
      double direct = 0.0;
      for (std::size_t l = 1; l <= 400; ++l) {
        double d = fam.fs[i][l - 1] - fam.fs[j][l - 1];
        direct += mp.profile.eigenvalue(l) * d * d;
      }
      const std::size_t n = 500;
      CHECK(kl_divergence(fam, i, j, n) == doctest::Approx(n * direct / (2.0 * 0.04)).epsilon(1e-12));
      CHECK(kl_divergence(fam, i, j, n) <= kl_bound_corrected(fam, n));
    }
  }
  CHECK(kl_divergence(fam, 2, 2, 10) == 0.0);
  CHECK(fam.source_norm_sq <= 1.0);
  CHECK(fam.min_separation_sq > eps * eps);
  CHECK(kl_bound_corrected(fam, 7) == 4.0 * kl_bound_display(fam, 7));
  CHECK_THROWS_AS(separation_sq(fam, 0, fam.fs.size()), RangeError);

  auto wrong = generate_packing(41, 11);
  CHECK_THROWS_AS(build_alternatives(eps, mp, s, wrong), ConstructionError);
  auto tiny = poly_params(60);
  CHECK_THROWS_AS(build_alternatives(eps, tiny, s, pk), ConstructionError);
}

TEST_CASE("fano report, s = 1/2") {
  auto mp = poly_params(20000);
  auto rep = fano_report(mp, 0.5, 10000, 7);
  CHECK(rep.valid);
  CHECK(rep.reason.empty());
  CHECK(rep.m >= 28);
  CHECK(rep.omega < 0.125);
  CHECK(rep.lower_bound_prob > 0.0);
  CHECK(rep.kl_within_corrected);
  CHECK(rep.epsilon <= rep.theoretical_rate);
  CHECK(rep.pairs.size() == rep.codes * (rep.codes - 1) / 2);
  CHECK(verify_packing(rep.packing).valid);

  std::string txt = fano_report_text(rep, {"seed=7"});
  CHECK(txt.rfind("# seed=7\nvalid = true\n", 0) == 0);
  std::string csv = pairwise_kl_csv(rep, {"seed=7"});
  CHECK(csv.find("i,j,hamming,separation_sq,kl,kl_bound_display,kl_bound_corrected\n") != std::string::npos);
  CHECK(count_lines(csv) == 2 + rep.codes - 1);
  std::string pcsv = packing_csv(rep.packing);
  CHECK(pcsv.rfind("c1,c2,", 0) == 0);
  CHECK(count_lines(pcsv) == 1 + rep.codes);
}

TEST_CASE("fano report failures are reported, not thrown") {
  auto rep = fano_report(poly_params(20000), 0.0, 10000, 7);
  CHECK_FALSE(rep.valid);
  CHECK_FALSE(rep.reason.empty());
  auto trunc = fano_report(poly_params(500), 0.5, 10000, 7);
  CHECK_FALSE(trunc.valid);
  CHECK(trunc.reason.find("truncation") != std::string::npos);
  auto small_n = fano_report(poly_params(20000, 10.0), 0.5, 1, 7);
  CHECK_FALSE(small_n.valid);
  CHECK(small_n.reason.find("n too small") != std::string::npos);
  CHECK_THROWS_AS(fano_report(poly_params(100), 0.9, 100, 7), DomainError);
}
