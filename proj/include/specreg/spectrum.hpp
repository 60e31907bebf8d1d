#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace specreg {

enum class ProfileKind { polynomial, polylog, plateau, regime_switch, explicit_values };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

struct PlateauLevel {
  double value;
  std::size_t run_length;
};

struct RegimeBreak {
  std::size_t start;  // 1-based index where this exponent takes over
  double exponent;
};

enum class DecayCheck { enforce, report_only };

// Dyadic decay metadata. EIGUP: mu_{2j}/mu_j <= 2^-nu_upper, EIGLOW: mu_{2j}/mu_j >= 2^-nu_lower,
// both asserted for j >= j0 (and 2j <= p).
struct DecaySpec {
  std::size_t j0 = 1;
  double nu_upper = 1.0;
  double nu_lower = 1.0;
  DecayCheck check = DecayCheck::enforce;
};

// Finite, strictly positive, nonincreasing eigenvalue sequence mu_1 >= ... >= mu_p.
// Immutable once built.
class SpectrumProfile {
 public:
  static SpectrumProfile polynomial(double b, std::size_t p, DecaySpec decay);
  // mu_i = i^-b (ln i)^c (ln ln i)^d, held constant below the first index where the
  // expression is positive and nonincreasing.
  static SpectrumProfile polylog(double b, double c, double d, std::size_t p, DecaySpec decay);
  static SpectrumProfile plateau(std::vector<PlateauLevel> levels, DecaySpec decay);
  // Continuous piecewise power law; the first break must start at index 1.
  static SpectrumProfile regime_switch(std::vector<RegimeBreak> breaks, std::size_t p,
                                       DecaySpec decay);
  static SpectrumProfile explicit_values(std::vector<double> values, DecaySpec decay);

  ProfileKind kind() const { return kind_; }
  std::size_t size() const { return values_.size(); }
  std::size_t j0() const { return j0_; }
  double nu_upper() const { return nu_upper_; }
  double nu_lower() const { return nu_lower_; }
  // Profile-level proxy for the kernel bound: the largest eigenvalue.
  double kappa_sq() const { return values_.front(); }

  // 1-based.
  double eigenvalue(std::size_t j) const;
  std::span<const double> eigenvalues() const { return values_; }

  // Generator parameters, kept for serialization.
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  const std::vector<PlateauLevel>& levels() const { return levels_; }
  const std::vector<RegimeBreak>& breaks() const { return breaks_; }

 private:
  SpectrumProfile(ProfileKind kind, std::vector<double> values, DecaySpec decay);

  ProfileKind kind_;
  std::vector<double> values_;
  std::size_t j0_;
  double nu_upper_;
  double nu_lower_;
  double b_ = 0.0;
  double c_ = 0.0;
  double d_ = 0.0;
  std::vector<PlateauLevel> levels_;
  std::vector<RegimeBreak> breaks_;
};

// Positive real or +infinity. The infinite value only takes part in comparisons.
class ExtendedReal {
 public:
  constexpr ExtendedReal(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  static constexpr ExtendedReal infinity() {
    ExtendedReal x(0.0);
    x.infinite_ = true;
    return x;
  }

  constexpr bool is_infinite() const { return infinite_; }
  // Throws DomainError when infinite.
  double value() const;

  friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.value_ <=> b.value_;
  }
  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return (a <=> b) == 0;
  }

 private:
  double value_;
  bool infinite_ = false;
};

double eigenvalue(const SpectrumProfile& profile, std::size_t j);

// F(t) = #{j : mu_j >= t}. Left-continuous.
std::size_t count_F(const SpectrumProfile& profile, double t);
// F(t+) = #{j : mu_j > t}.
std::size_t count_F_strict(const SpectrumProfile& profile, double t);

// G(t) = t^(2r+1) / F(t), +infinity where F(t) = 0.
ExtendedReal gee(const SpectrumProfile& profile, double t, double r);

// max{t : G(t) <= u}, computed by exact piecewise inversion. The result always satisfies
// G(result) <= u when re-evaluated; it never exceeds mu_1.
double gee_inverse(const SpectrumProfile& profile, double u, double r);

// N(lambda) = sum_j mu_j / (mu_j + lambda).
double effective_dimension(const SpectrumProfile& profile, double lambda);

// 1 + 2 (1 - 2^(1-nu))^-1, or +infinity for nu <= 1.
double effective_dimension_factor(double nu);

struct DecayViolation {
  std::size_t j;
  double ratio;  // mu_{2j} / mu_j
  bool eigup;    // ratio > 2^-nu_upper
  bool eiglow;   // ratio < 2^-nu_lower
};

struct DecayReport {
  bool eigup_ok = true;
  bool eiglow_ok = true;
  std::vector<DecayViolation> violations;
  std::vector<std::size_t> worst_ratio_indices;
};

DecayReport verify_decay(const SpectrumProfile& profile);

struct DecayExponents {
  double nu_upper;
  double nu_lower;
};

// Tightest exponents satisfied by mu_{2j}/mu_j over j in [j0, p/2].
DecayExponents measure_decay_exponents(std::span<const double> values, std::size_t j0);

}  // namespace specreg
