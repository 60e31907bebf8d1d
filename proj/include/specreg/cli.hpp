#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "specreg/config.hpp"

namespace specreg {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitHypothesis = 4,
};

struct CommandOptions {
  std::string config_path;
  unsigned jobs = 1;
  std::optional<std::string> out_dir;  // overrides output.dir
  bool svg = false;
  std::optional<std::string> data_path;  // fit only; overrides fit.data
};

// Runs one subcommand ("spectrum-report", "fit", "rates", "lowerbound", "filter-check") and
// maps failures onto the exit-code taxonomy. Messages go to `log`.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& log);

// The commands proper; they throw ConfigError / DataError / HypothesisError.
void cmd_spectrum_report(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_fit(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_rates(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_lowerbound(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_filter_check(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log);

}  // namespace specreg
