#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "specreg/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral regularization experiments on synthetic Mercer problems"};
  app.require_subcommand(1);

  specreg::CommandOptions options;
  std::string out_dir;
  std::string data_path;

  const char* commands[][2] = {
      {"spectrum-report", "Tabulate F, G, G^-1, N(lambda) and the spectrum property checks"},
      {"fit", "Fit one dataset (synthetic or --data CSV) and report coefficients and errors"},
      {"rates", "Monte Carlo convergence-rate experiment over the configured n grid"},
      {"lowerbound", "Build the packing certificate and the Fano lower-bound report"},
      {"filter-check", "Verify declared filter constants and measure qualification"},
  };
  for (auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", options.config_path, "Experiment config (JSON)")->required();
    sub->add_option("--jobs", options.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_flag("--svg", options.svg, "Also write an SVG log-log plot (rates)");
    if (std::string(name) == "fit") sub->add_option("--data", data_path, "Two-column x,y CSV");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : specreg::kExitConfig;
  }
  if (!out_dir.empty()) options.out_dir = out_dir;
  if (!data_path.empty()) options.data_path = data_path;
  const std::string command = app.get_subcommands().front()->get_name();
  return specreg::run_command(command, options, std::cerr);
}
