#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "specreg/rates.hpp"

namespace specreg {

using SignCode = std::vector<std::int8_t>;  // entries in {-1, +1}

// Sign-vector packing used by the Fano construction:
//   pairwise Hamming distance > m/4, ln(N - 1) >= m/36, m >= 28.
struct PackingCertificate {
  std::size_t m = 0;
  std::vector<SignCode> codes;
  std::size_t min_hamming = 0;
  double log_capacity = 0.0;  // ln(N - 1)
};

std::size_t hamming(const SignCode& a, const SignCode& b);

// Number of codes the construction needs for length m: ceil(exp(m / 36)) + 1.
double required_codes(std::size_t m);

// Largest packing the greedy construction will attempt to materialize.
inline constexpr std::size_t kMaxExplicitCodes = 4096;

// Greedy rejection sampling: random sign vectors are kept when they are at Hamming distance
// > m/4 from every kept code, until required_codes(m) are kept. Throws ConstructionError if
// the draw budget runs out or the required size exceeds kMaxExplicitCodes; never returns a
// weaker certificate. Throws DomainError for m < 28.
PackingCertificate generate_packing(std::size_t m, std::uint64_t seed,
                                    std::size_t draw_budget = 1000000);

struct PackingCheck {
  bool valid = true;
  std::vector<std::string> failures;
};

// Recomputes every invariant from the codes themselves.
PackingCheck verify_packing(const PackingCertificate& packing);

// Largest admissible epsilon (exclusive): 2^(-nu_lower (r + s)) R mu_max(28, j0).
double epsilon_threshold(const ModelParams& params, double s);

// m(eps) = F(2^nu_lower (eps / R)^(1 / (r + s))). Requires eps < epsilon_threshold.
std::size_t choose_m(double epsilon, const ModelParams& params, double s);

// Alternatives f_i = B^r g_i with g_i = (eps / sqrt m) sum_{l=m+1}^{2m} rho_i^(l-m) mu_l^-(r+s) e_l.
struct AlternativeFamily {
  double epsilon = 0.0;
  std::size_t m = 0;
  double s = 0.0;
  ModelParams params;
  std::vector<std::vector<double>> fs{};  // H-ONB coefficients, length p
  std::vector<double> block_mu{};         // mu_l for l = m+1..2m
  std::vector<double> block_weight{};     // mu_l^(2s) for l = m+1..2m
  double source_norm_sq = 0.0;          // ||g_i||_H^2, identical for every i
  double min_separation_sq = 0.0;       // min_{i != j} ||B^s (f_i - f_j)||_H^2
};

// Builds the family and certifies source membership and pairwise separation > eps^2 by
// direct computation. Throws ConstructionError naming the violating pair.
AlternativeFamily build_alternatives(double epsilon, const ModelParams& params, double s,
                                     const PackingCertificate& packing);

double separation_sq(const AlternativeFamily& family, std::size_t i, std::size_t j);

// KL(P_i^n, P_j^n) = n (2 sigma^2)^-1 ||sqrt(B) (f_i - f_j)||_H^2 for Gaussian noise.
double kl_divergence(const AlternativeFamily& family, std::size_t i, std::size_t j, std::size_t n);

// Per-pair KL bounds n C R^2 sigma^-2 (eps / R)^((2r+1)/(r+s)):
// the constant as displayed in the construction, 2^(nu_lower (1-2s)) / 2, and the constant that
// the coefficient algebra actually supports, four times larger.
double kl_bound_display(const AlternativeFamily& family, std::size_t n);
double kl_bound_corrected(const AlternativeFamily& family, std::size_t n);

struct PairStats {
  std::size_t i;
  std::size_t j;
  std::size_t hamming;
  double separation_sq;
  double kl;
};

struct FanoReport {
  double epsilon = 0.0;
  double omega = 0.0;
  double lower_bound_prob = 0.0;
  bool valid = false;
  std::string reason;

  std::size_t n = 0;
  double s = 0.0;
  std::size_t m = 0;
  std::size_t codes = 0;
  std::size_t min_hamming = 0;
  double log_capacity = 0.0;
  double theoretical_rate = 0.0;
  double mean_kl = 0.0;
  double max_kl = 0.0;
  double kl_bound_display = 0.0;
  double kl_bound_corrected = 0.0;
  bool kl_within_display = false;
  bool kl_within_corrected = false;
  double min_separation_sq = 0.0;

  PackingCertificate packing;
  std::vector<PairStats> pairs;  // every i < j
};

// eps = 2^-nu_lower (R / 288) G^-1(sigma^2 / (R^2 n))^(r+s); builds the family, takes the last
// element as reference and evaluates the Fano bound
//   sqrt(N-1) / (1 + sqrt(N-1)) (1 - 2 omega - sqrt(2 omega / ln(N-1))).
// Failures of any precondition are reported with valid = false and a reason.
FanoReport fano_report(const ModelParams& params, double s, std::size_t n, std::uint64_t seed);

std::string fano_report_text(const FanoReport& report, const std::vector<std::string>& comments = {});
// Rows for the pairs (i, N-1) against the reference element, which enter omega.
std::string pairwise_kl_csv(const FanoReport& report, const std::vector<std::string>& comments = {});
std::string packing_csv(const PackingCertificate& packing,
                        const std::vector<std::string>& comments = {});

}  // namespace specreg
