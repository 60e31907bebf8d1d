#include "specreg/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specreg/errors.hpp"

namespace specreg {
namespace {

// Relative slack when comparing dyadic ratios against 2^-nu; pow() rounding would otherwise
// flag the exact j^-b ratio as a violation.
constexpr double kRatioSlack = 1e-12;

void validate_values(const std::vector<double>& values) {
  if (values.empty()) throw ConstructionError("spectrum profile must have at least one eigenvalue");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] <= 0.0) {
      std::ostringstream msg;
      msg << "eigenvalue mu_" << i + 1 << " = " << values[i] << " is not strictly positive";
      throw ConstructionError(msg.str());
    }
    if (i > 0 && values[i] > values[i - 1]) {
      std::ostringstream msg;
      msg << "eigenvalues must be nonincreasing: mu_" << i + 1 << " > mu_" << i;
      throw ConstructionError(msg.str());
    }
  }
}

double polylog_term(double i, double b, double c, double d) {
  double v = std::pow(i, -b);
  if (c != 0.0) v *= std::pow(std::log(i), c);
  if (d != 0.0) v *= std::pow(std::log(std::log(i)), d);
  return v;
}

}  // namespace

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::polynomial: return "polynomial";
    case ProfileKind::polylog: return "polylog";
    case ProfileKind::plateau: return "plateau";
    case ProfileKind::regime_switch: return "regime_switch";
    case ProfileKind::explicit_values: return "explicit";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "polynomial") return ProfileKind::polynomial;
  if (name == "polylog") return ProfileKind::polylog;
  if (name == "plateau") return ProfileKind::plateau;
  if (name == "regime_switch") return ProfileKind::regime_switch;
  if (name == "explicit") return ProfileKind::explicit_values;
  throw ConfigError("unknown spectrum kind '" + name + "'");
}

SpectrumProfile::SpectrumProfile(ProfileKind kind, std::vector<double> values, DecaySpec decay)
    : kind_(kind),
      values_(std::move(values)),
      j0_(decay.j0),
      nu_upper_(decay.nu_upper),
      nu_lower_(decay.nu_lower) {
  validate_values(values_);
  if (j0_ < 1 || j0_ > values_.size()) throw ConstructionError("j0 must lie in [1, p]");
  if (!(nu_upper_ >= 1.0)) throw ConstructionError("nu_upper must be >= 1");
  if (!(nu_lower_ >= nu_upper_)) throw ConstructionError("nu_lower must be >= nu_upper");
  if (decay.check == DecayCheck::enforce) {
    DecayReport report = verify_decay(*this);
    if (!report.eigup_ok || !report.eiglow_ok) {
      const DecayViolation& v = report.violations.front();
      std::ostringstream msg;
      msg << "decay assumption violated at j = " << v.j << ": mu_2j/mu_j = " << v.ratio
          << " outside [2^-" << nu_lower_ << ", 2^-" << nu_upper_ << "]";
      throw ConstructionError(msg.str());
    }
  }
}

SpectrumProfile SpectrumProfile::polynomial(double b, std::size_t p, DecaySpec decay) {
  if (!(b > 0.0)) throw ConstructionError("polynomial exponent b must be positive");
  if (p == 0) throw ConstructionError("truncation length p must be positive");
  std::vector<double> values(p);
  for (std::size_t j = 0; j < p; ++j) values[j] = std::pow(static_cast<double>(j + 1), -b);
  SpectrumProfile profile(ProfileKind::polynomial, std::move(values), decay);
  profile.b_ = b;
  return profile;
}

SpectrumProfile SpectrumProfile::polylog(double b, double c, double d, std::size_t p,
                                         DecaySpec decay) {
  if (!(b > 0.0)) throw ConstructionError("polylog exponent b must be positive");
  if (p == 0) throw ConstructionError("truncation length p must be positive");
  // ln ln i > 0 needs i >= 3, ln i > 0 needs i >= 2.
  std::size_t start = d != 0.0 ? 3 : (c != 0.0 ? 2 : 1);
  std::size_t peak = start;
  while (polylog_term(static_cast<double>(peak + 1), b, c, d) >
         polylog_term(static_cast<double>(peak), b, c, d)) {
    ++peak;
    if (peak > 1000000) throw ConstructionError("polylog profile does not turn decreasing");
  }
  std::vector<double> values(p);
  for (std::size_t j = 1; j <= p; ++j)
    values[j - 1] = polylog_term(static_cast<double>(std::max(j, peak)), b, c, d);
  SpectrumProfile profile(ProfileKind::polylog, std::move(values), decay);
  profile.b_ = b;
  profile.c_ = c;
  profile.d_ = d;
  return profile;
}

SpectrumProfile SpectrumProfile::plateau(std::vector<PlateauLevel> levels, DecaySpec decay) {
  if (levels.empty()) throw ConstructionError("plateau profile needs at least one level");
  std::vector<double> values;
  for (const auto& level : levels) {
    if (level.run_length == 0) throw ConstructionError("plateau run length must be positive");
    values.insert(values.end(), level.run_length, level.value);
  }
  SpectrumProfile profile(ProfileKind::plateau, std::move(values), decay);
  profile.levels_ = std::move(levels);
  return profile;
}

SpectrumProfile SpectrumProfile::regime_switch(std::vector<RegimeBreak> breaks, std::size_t p,
                                               DecaySpec decay) {
  if (breaks.empty() || breaks.front().start != 1)
    throw ConstructionError("regime_switch needs a first break at index 1");
  for (std::size_t k = 1; k < breaks.size(); ++k)
    if (breaks[k].start <= breaks[k - 1].start)
      throw ConstructionError("regime_switch break indices must increase");
  for (const auto& br : breaks)
    if (!(br.exponent > 0.0)) throw ConstructionError("regime exponents must be positive");
  if (p == 0) throw ConstructionError("truncation length p must be positive");

  // mu_j = scale_k * j^-b_k on regime k, scales chained for continuity at each break.
  std::vector<double> scale(breaks.size(), 1.0);
  for (std::size_t k = 1; k < breaks.size(); ++k) {
    double s = static_cast<double>(breaks[k].start);
    scale[k] = scale[k - 1] * std::pow(s, breaks[k].exponent - breaks[k - 1].exponent);
  }
  std::vector<double> values(p);
  std::size_t regime = 0;
  for (std::size_t j = 1; j <= p; ++j) {
    while (regime + 1 < breaks.size() && j >= breaks[regime + 1].start) ++regime;
    values[j - 1] = scale[regime] * std::pow(static_cast<double>(j), -breaks[regime].exponent);
  }
  SpectrumProfile profile(ProfileKind::regime_switch, std::move(values), decay);
  profile.breaks_ = std::move(breaks);
  return profile;
}

SpectrumProfile SpectrumProfile::explicit_values(std::vector<double> values, DecaySpec decay) {
  return SpectrumProfile(ProfileKind::explicit_values, std::move(values), decay);
}

double SpectrumProfile::eigenvalue(std::size_t j) const {
  if (j < 1 || j > values_.size()) {
    std::ostringstream msg;
    msg << "eigenvalue index " << j << " outside [1, " << values_.size() << "]";
    throw RangeError(msg.str());
  }
  return values_[j - 1];
}

double ExtendedReal::value() const {
  if (infinite_) throw DomainError("value() called on +infinity");
  return value_;
}

double eigenvalue(const SpectrumProfile& profile, std::size_t j) { return profile.eigenvalue(j); }

std::size_t count_F(const SpectrumProfile& profile, double t) {
  if (!(t > 0.0)) throw DomainError("count_F requires t > 0");
  auto mu = profile.eigenvalues();
  auto it = std::partition_point(mu.begin(), mu.end(), [t](double m) { return m >= t; });
  return static_cast<std::size_t>(it - mu.begin());
}

std::size_t count_F_strict(const SpectrumProfile& profile, double t) {
  if (!(t > 0.0)) throw DomainError("count_F requires t > 0");
  auto mu = profile.eigenvalues();
  auto it = std::partition_point(mu.begin(), mu.end(), [t](double m) { return m > t; });
  return static_cast<std::size_t>(it - mu.begin());
}

ExtendedReal gee(const SpectrumProfile& profile, double t, double r) {
  if (!(t > 0.0)) throw DomainError("gee requires t > 0");
  std::size_t f = count_F(profile, t);
  if (f == 0) return ExtendedReal::infinity();
  return std::pow(t, 2.0 * r + 1.0) / static_cast<double>(f);
}

double gee_inverse(const SpectrumProfile& profile, double u, double r) {
  if (!(u > 0.0)) throw DomainError("gee_inverse requires u > 0");
  if (!(r > 0.0)) throw DomainError("gee_inverse requires r > 0");
  auto mu = profile.eigenvalues();
  const std::size_t p = mu.size();
  const double exponent = 1.0 / (2.0 * r + 1.0);

  // On (mu_{k+1}, mu_k] with mu_{k+1} < mu_k the count is k and G is a monomial.
  double best = 0.0;
  for (std::size_t k = 1; k <= p; ++k) {
    double upper = mu[k - 1];
    double lower = k < p ? mu[k] : 0.0;
    if (!(lower < upper)) continue;
    double candidate = std::min(upper, std::pow(u * static_cast<double>(k), exponent));
    if (candidate > lower) best = std::max(best, candidate);
  }
  // Re-evaluate so that G(result) <= u holds in floating point.
  while (best > 0.0 && gee(profile, best, r) > ExtendedReal(u))
    best = std::nextafter(best, 0.0);
  if (!(best > 0.0)) throw DomainError("gee_inverse underflowed to zero");
  return best;
}

double effective_dimension(const SpectrumProfile& profile, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("effective_dimension requires lambda > 0");
  double sum = 0.0;
  for (double m : profile.eigenvalues()) sum += m / (m + lambda);
  return sum;
}

double effective_dimension_factor(double nu) {
  double gap = 1.0 - std::pow(2.0, 1.0 - nu);
  if (!(gap > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 + 2.0 / gap;
}

DecayReport verify_decay(const SpectrumProfile& profile) {
  DecayReport report;
  const double upper = std::pow(2.0, -profile.nu_upper());
  const double lower = std::pow(2.0, -profile.nu_lower());
  const std::size_t p = profile.size();
  double worst_up = -1.0;
  double worst_low = -1.0;
  std::size_t worst_up_j = 0;
  std::size_t worst_low_j = 0;
  for (std::size_t j = profile.j0(); 2 * j <= p; ++j) {
    double ratio = profile.eigenvalue(2 * j) / profile.eigenvalue(j);
    bool up_bad = ratio > upper * (1.0 + kRatioSlack);
    bool low_bad = ratio < lower * (1.0 - kRatioSlack);
    if (up_bad || low_bad) report.violations.push_back({j, ratio, up_bad, low_bad});
    if (up_bad && ratio / upper > worst_up) {
      worst_up = ratio / upper;
      worst_up_j = j;
    }
    if (low_bad && lower / ratio > worst_low) {
      worst_low = lower / ratio;
      worst_low_j = j;
    }
    report.eigup_ok = report.eigup_ok && !up_bad;
    report.eiglow_ok = report.eiglow_ok && !low_bad;
  }
  if (worst_up_j != 0) report.worst_ratio_indices.push_back(worst_up_j);
  if (worst_low_j != 0 && worst_low_j != worst_up_j) report.worst_ratio_indices.push_back(worst_low_j);
  return report;
}

DecayExponents measure_decay_exponents(std::span<const double> values, std::size_t j0) {
  if (j0 < 1 || 2 * j0 > values.size())
    throw DomainError("measure_decay_exponents needs 1 <= j0 and 2 j0 <= p");
  double max_ratio = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t j = j0; 2 * j <= values.size(); ++j) {
    double ratio = values[2 * j - 1] / values[j - 1];
    max_ratio = std::max(max_ratio, ratio);
    min_ratio = std::min(min_ratio, ratio);
  }
  return {-std::log2(max_ratio), -std::log2(min_ratio)};
}

}  // namespace specreg
