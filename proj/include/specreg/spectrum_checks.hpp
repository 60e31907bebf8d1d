#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "specreg/spectrum.hpp"

namespace specreg {

struct PropertyCheck {
  std::string name;
  bool applicable = true;  // false when the hypothesis (EIGUP) is not verified
  std::size_t tested = 0;
  std::size_t failed = 0;
  double worst_ratio = 0.0;  // max lhs / rhs over tested points
  bool ok() const { return !applicable || failed == 0; }
};

struct SpectrumCheckReport {
  DecayReport decay;
  std::vector<PropertyCheck> checks;
  bool all_ok() const;
};

// Property suite for F, G, G^-1 and N on one profile:
//   G_scaling: G(ct) <= c G(t) on the eigenvalue breakpoints, c in c_grid
//   F_ratio, G_ratio: F(t) <= 4 C^(1/nu*) F(Ct), G(Ct) <= 4 C^(2r+1+1/nu*) G(t)
//     for breakpoints t <= mu_j0 / C, C in C_grid
//   G_of_inverse_le_u: G(G^-1(u)) <= u;  G_of_inverse_ge_u_over_4: G(G^-1(u)) >= u/4 where G^-1(u) < min(mu_2j0, mu_1)
//   effdim: N(lambda) <= F(lambda) (1 + 2 (1 - 2^(1-nu))^-1) on 50 log-spaced lambda with F >= j0
// The EIGUP-dependent checks are marked not applicable when verify_decay rejects EIGUP.
struct CheckGrid {
  std::vector<double> c_values{0.1, 0.5, 1.0};
  std::vector<double> C_values{1.0, 2.0, 10.0};
  std::size_t u_points = 200;
  std::size_t lambda_points = 50;
  double effdim_nu = 0.0;  // exponent in the N(lambda) bound; 0 selects the profile's nu_lower
};

SpectrumCheckReport check_spectrum_properties(const SpectrumProfile& profile, double r,
                                              const CheckGrid& grid = {});

// Distinct eigenvalues in decreasing order.
std::vector<double> breakpoints(const SpectrumProfile& profile);

std::string spectrum_check_summary(const SpectrumCheckReport& report,
                                   const std::vector<std::string>& comments = {});

}  // namespace specreg
