#include "specreg/cli.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "specreg/errors.hpp"
#include "specreg/estimator.hpp"
#include "specreg/lowerbound.hpp"
#include "specreg/rates.hpp"
#include "specreg/report_io.hpp"
#include "specreg/spectrum_checks.hpp"

namespace specreg {
namespace {

namespace fs = std::filesystem;

fs::path output_dir(const ExperimentConfig& config, const CommandOptions& options) {
  return options.out_dir ? fs::path(*options.out_dir) : fs::path(config.output_dir);
}

void emit(const fs::path& path, const std::string& content, std::ostream& log) {
  write_text_file(path, content);
  log << "wrote " << path.string() << '\n';
}

std::string prefix_comments(const std::vector<std::string>& comments, const std::string& body) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  return out + body;
}

double problem_r(const ExperimentConfig& config) {
  return config.problem ? config.problem->source.r : 0.5;
}

std::string first_violation(const DecayReport& report, bool eigup) {
  for (const auto& v : report.violations) {
    if (eigup ? v.eigup : v.eiglow) {
      std::ostringstream msg;
      msg << "j = " << v.j << ", mu_2j/mu_j = " << format_real(v.ratio);
      return msg.str();
    }
  }
  return "none";
}

void require_eigup(const SpectrumProfile& profile) {
  DecayReport report = verify_decay(profile);
  if (!report.eigup_ok) {
    std::ostringstream msg;
    msg << "EIGUP violated (mu_2j/mu_j <= 2^-" << format_real(profile.nu_upper())
        << " for j >= " << profile.j0() << "), first at " << first_violation(report, true)
        << "; the upper rate needs EIGUP";
    throw HypothesisError(msg.str());
  }
}

void require_eiglow(const SpectrumProfile& profile) {
  DecayReport report = verify_decay(profile);
  if (!report.eiglow_ok) {
    std::ostringstream msg;
    msg << "EIGLOW violated (mu_2j/mu_j >= 2^-" << format_real(profile.nu_lower())
        << " for j >= " << profile.j0() << "), first at " << first_violation(report, false)
        << "; the lower bound needs EIGLOW";
    throw HypothesisError(msg.str());
  }
}

FilterFamily configured_filter(const ExperimentConfig& config) {
  return config.filter ? *config.filter : FilterFamily::tikhonov();
}

std::string s_tag(double s) {
  std::ostringstream out;
  out << s;
  return out.str();
}

}  // namespace

void cmd_spectrum_report(const ExperimentConfig& config, const CommandOptions& options,
                         std::ostream& log) {
  const auto& profile = config.profile;
  const double r = problem_r(config);
  const auto header = config.header();
  const fs::path dir = output_dir(config, options);

  CsvWriter spectrum({"t", "F", "G"}, header);
  for (double t : breakpoints(profile)) {
    ExtendedReal g = gee(profile, t, r);
    spectrum.row({format_real(t), std::to_string(count_F(profile, t)),
                  g.is_infinite() ? std::string("inf") : format_real(g.value())});
  }
  emit(dir / "spectrum.csv", spectrum.str(), log);

  const double factor = effective_dimension_factor(profile.nu_lower());
  CsvWriter effdim({"lambda", "N", "F_bound"}, header);
  const double lo = profile.eigenvalue(profile.size());
  const double hi = profile.eigenvalue(1);
  for (double lambda : geometric_grid(lo, hi, 50)) {
    double bound = static_cast<double>(count_F(profile, lambda)) * factor;
    effdim.row({format_real(lambda), format_real(effective_dimension(profile, lambda)),
                format_real(bound)});
  }
  emit(dir / "effdim.csv", effdim.str(), log);

  CsvWriter inverse({"u", "G_inverse", "G_at_inverse"}, header);
  const double u_lo = gee(profile, lo, r).value() * 1e-2;
  const double u_hi = gee(profile, hi, r).value() * 1e2;
  for (double u : geometric_grid(u_lo, u_hi, 50)) {
    double t = gee_inverse(profile, u, r);
    inverse.row({u, t, gee(profile, t, r).value()});
  }
  emit(dir / "ginverse.csv", inverse.str(), log);

  SpectrumCheckReport checks = check_spectrum_properties(profile, r);
  auto summary_header = header;
  summary_header.push_back("r=" + format_real(r));
  emit(dir / "spectrum_summary.txt", spectrum_check_summary(checks, summary_header), log);
  if (!checks.decay.eiglow_ok)
    log << "note: EIGLOW fails for this profile; the lowerbound command will refuse it\n";
  if (!checks.decay.eigup_ok)
    log << "note: EIGUP fails for this profile; the rates command will refuse it\n";
}

void cmd_fit(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log) {
  if (!config.fit) throw ConfigError("config has no 'fit' section");
  MercerProblem problem = config.make_problem();
  const FilterFamily filter = configured_filter(config);
  const fs::path dir = output_dir(config, options);

  std::optional<std::string> data_path = options.data_path ? options.data_path : config.fit->data;
  Dataset data;
  if (data_path) {
    read_xy_csv(*data_path, data.x, data.y);
    data.seed = config.seed;
  } else {
    if (config.fit->n == 0) throw ConfigError("fit: synthetic fit needs 'n' > 0");
    data = sample(problem, config.fit->n, config.seed);
  }
  const std::size_t n = data.x.size();
  const ModelParams params = model_params(problem);
  const double lambda = config.fit->lambda ? *config.fit->lambda : lambda_rule(params, n);

  Eigen::MatrixXd K = gram(problem, data.x);
  FitResult result = fit(K, data.y, lambda, filter, problem.kappa_sq());
  result.eigencoeffs = eigencoeffs(problem, data.x, result.alpha);

  auto header = config.header();
  emit(dir / "fit_alpha.csv", fit_csv(result, n, config.seed, header), log);

  CsvWriter meta({"key", "value"}, header);
  meta.row({"lambda", format_real(lambda)});
  meta.row({"lambda_source", config.fit->lambda ? "config" : "lambda_rule"});
  meta.row({"filter", to_string(filter.kind())});
  meta.row({"kappa_sq", format_real(problem.kappa_sq())});
  meta.row({"n", std::to_string(n)});
  meta.row({"seed", std::to_string(config.seed)});
  meta.row({"data", data_path ? "file" : "synthetic"});
  emit(dir / "fit_metadata.csv", meta.str(), log);

  if (!data_path) {
    CsvWriter errors({"s", "error_norm"}, header);
    for (double s : {0.0, 0.5}) errors.row({s, error_norm(problem, result.eigencoeffs, s)});
    emit(dir / "fit_errors.csv", errors.str(), log);
  }
}

void cmd_rates(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log) {
  if (!config.rates) throw ConfigError("config has no 'rates' section");
  MercerProblem problem = config.make_problem();
  require_eigup(config.profile);
  const FilterFamily filter = configured_filter(config);
  const fs::path dir = output_dir(config, options);

  RateConfig rc;
  rc.n_grid = config.rates->n_grid;
  rc.replicates = config.rates->replicates;
  rc.s = config.rates->s;
  rc.seed = config.seed;
  rc.jobs = options.jobs;
  RateReport report = run_rate_experiment(problem, filter, rc);

  const double lambda_min = lambda_rule(model_params(problem), rc.n_grid.back());
  const double mu_p = config.profile.eigenvalue(config.profile.size());
  if (mu_p > 1e-3 * lambda_min) {
    std::ostringstream msg;
    msg << "truncation: mu_p = " << format_real(mu_p) << " exceeds 1e-3 * smallest lambda "
        << format_real(lambda_min);
    report.warnings.push_back(msg.str());
  }

  auto header = config.header();
  emit(dir / "rates.csv", rates_csv(report, header), log);
  auto slope_header = header;
  for (const auto& w : report.warnings) {
    slope_header.push_back("warning: " + w);
    log << "warning: " << w << '\n';
  }
  emit(dir / "slopes.csv", slopes_csv(report, slope_header), log);
  if (options.svg) {
    std::string svg = "<!-- " + header[0] + " " + header[1] + " -->\n" + rates_svg(report);
    emit(dir / "rates.svg", svg, log);
  }
  log << "fitted slope " << format_real(report.fitted_slope) << ", theoretical slope "
      << format_real(report.theoretical_slope) << '\n';
}

void cmd_lowerbound(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log) {
  if (!config.lowerbound) throw ConfigError("config has no 'lowerbound' section");
  MercerProblem problem = config.make_problem();
  require_eiglow(config.profile);
  if (problem.noise().kind != NoiseModel::Kind::gaussian)
    throw HypothesisError("the lower-bound construction needs Gaussian noise");
  const fs::path dir = output_dir(config, options);
  const ModelParams params = model_params(problem);
  auto header = config.header();

  for (double s : config.lowerbound->s_values) {
    FanoReport report = fano_report(params, s, config.lowerbound->n, config.seed);
    const std::string tag = s_tag(s);
    emit(dir / ("fano_s" + tag + ".txt"), fano_report_text(report, header), log);
    emit(dir / ("pairwise_kl_s" + tag + ".csv"), pairwise_kl_csv(report, header), log);
    if (!report.packing.codes.empty())
      emit(dir / ("packing_s" + tag + ".csv"), packing_csv(report.packing, header), log);
    log << "s = " << tag << ": valid = " << (report.valid ? "true" : "false");
    if (!report.reason.empty()) log << " (" << report.reason << ")";
    log << '\n';
  }
}

void cmd_filter_check(const ExperimentConfig& config, const CommandOptions& options,
                      std::ostream& log) {
  const FilterFamily filter = configured_filter(config);
  const FilterCheckSettings settings = config.filter_check.value_or(FilterCheckSettings{});
  const fs::path dir = output_dir(config, options);
  auto header = config.header();
  header.push_back("filter=" + to_string(filter.kind()));

  ConstantsReport constants = verify_constants(filter, settings.grid_size);
  emit(dir / "filter_constants.csv", prefix_comments(header, constants_report_csv(constants)), log);

  CsvWriter qual({"q", "gamma_q_hat", "saturates", "sup_lambda_1e-2", "sup_lambda_1e-4",
                  "sup_lambda_1e-6"},
                 header);
  for (const auto& result : measure_qualification(filter, settings.q_candidates, settings.grid_size)) {
    std::vector<std::string> cells{format_real(result.q), format_real(result.gamma_q_hat),
                                   result.saturates ? "true" : "false"};
    for (double sup : result.refinement_sups) cells.push_back(format_real(sup));
    qual.row(cells);
  }
  emit(dir / "filter_qualification.csv", qual.str(), log);
  log << "declared constants " << (constants.holds ? "hold" : "DO NOT hold") << '\n';
}

int run_command(const std::string& command, const CommandOptions& options, std::ostream& log) {
  try {
    ExperimentConfig config = load_config(options.config_path);
    if (command == "spectrum-report") {
      cmd_spectrum_report(config, options, log);
    } else if (command == "fit") {
      cmd_fit(config, options, log);
    } else if (command == "rates") {
      cmd_rates(config, options, log);
    } else if (command == "lowerbound") {
      cmd_lowerbound(config, options, log);
    } else if (command == "filter-check") {
      cmd_filter_check(config, options, log);
    } else {
      throw ConfigError("unknown command '" + command + "'");
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    log << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const HypothesisError& e) {
    log << "hypothesis gate: " << e.what() << '\n';
    return kExitHypothesis;
  }
  return kExitOk;
}

}  // namespace specreg
