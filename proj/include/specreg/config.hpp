#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specreg/filters.hpp"
#include "specreg/mercer.hpp"
#include "specreg/spectrum.hpp"

namespace specreg {

// Experiment configuration, JSON. Top-level keys:
//   seed (required, unsigned integer), spectrum (required), problem, filter, rates, fit,
//   lowerbound, filter_check, output.
// Every section is validated and every object is constructed at load time; unknown keys and
// wrong types raise ConfigError.

struct ProblemSettings {
  BasisKind basis = BasisKind::fourier_unit_interval;
  SourceParams source;
  double rho = 0.5;
  NoiseModel noise = NoiseModel::gaussian(0.1);
};

struct RateSettings {
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 20;
  double s = 0.5;
};

struct FitSettings {
  std::size_t n = 0;
  std::optional<double> lambda;  // lambda_rule when absent
  std::optional<std::string> data;
};

struct LowerBoundSettings {
  std::size_t n = 0;
  std::vector<double> s_values{0.0, 0.5};
};

struct FilterCheckSettings {
  std::size_t grid_size = 1000;
  std::vector<double> q_candidates{1.0, 2.0, 4.0};
};

struct ExperimentConfig {
  nlohmann::json source;  // the parsed document
  std::string hash;       // fnv1a64 of the canonical dump, hex
  std::uint64_t seed = 0;
  SpectrumProfile profile;
  std::optional<ProblemSettings> problem{};
  std::optional<FilterFamily> filter{};
  std::optional<RateSettings> rates{};
  std::optional<FitSettings> fit{};
  std::optional<LowerBoundSettings> lowerbound{};
  std::optional<FilterCheckSettings> filter_check{};
  std::string output_dir = "out";

  MercerProblem make_problem() const;  // ConfigError without a problem section
  // "config_hash=<hex>" and "seed=<n>".
  std::vector<std::string> header() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Spectrum section round trip. Profiles are built with DecayCheck::report_only; decay
// hypotheses are checked by the commands that need them.
nlohmann::json profile_to_json(const SpectrumProfile& profile);
SpectrumProfile profile_from_json(const nlohmann::json& section);

nlohmann::json filter_to_json(const FilterFamily& filter);
FilterFamily filter_from_json(const nlohmann::json& section);

}  // namespace specreg
