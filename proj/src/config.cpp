#include "specreg/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "specreg/errors.hpp"
#include "specreg/report_io.hpp"

namespace specreg {
namespace {

using nlohmann::json;

// Typed access to one JSON object that rejects keys it was not asked about.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("must be an object");
  }

  void allow(std::initializer_list<const char*> keys) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : node_.items())
      if (!allowed.count(key)) fail("unknown key '" + key + "'");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& at(const std::string& key) const {
    if (!has(key)) fail("missing required key '" + key + "'");
    return node_.at(key);
  }

  double real(const std::string& key) const { return as_real(at(key), key); }
  double real(const std::string& key, double fallback) const {
    return has(key) ? real(key) : fallback;
  }

  std::uint64_t uint(const std::string& key) const { return as_uint(at(key), key); }
  std::uint64_t uint(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? uint(key) : fallback;
  }

  std::string text(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_string()) fail("'" + key + "' must be a string");
    return v.get<std::string>();
  }

  const json& array(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) fail("'" + key + "' must be an array");
    return v;
  }

  double as_real(const json& v, const std::string& what) const {
    if (!v.is_number()) fail("'" + what + "' must be a number");
    return v.get<double>();
  }

  std::uint64_t as_uint(const json& v, const std::string& what) const {
    if (!v.is_number_unsigned()) fail("'" + what + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  [[noreturn]] void fail(const std::string& why) const { throw ConfigError(path_ + ": " + why); }

 private:
  const json& node_;
  std::string path_;
};

DecaySpec decay_from(const Section& sec) {
  DecaySpec decay;
  decay.j0 = sec.uint("j0", 1);
  decay.nu_upper = sec.real("nu_upper");
  decay.nu_lower = sec.real("nu_lower");
  decay.check = DecayCheck::report_only;
  return decay;
}

ProblemSettings problem_from_json(const json& node) {
  Section sec(node, "problem");
  sec.allow({"basis", "r", "R", "rho", "noise"});
  ProblemSettings out;
  if (sec.has("basis")) {
    try {
      out.basis = basis_kind_from_string(sec.text("basis"));
    } catch (const ConfigError& e) {
      sec.fail(e.what());
    }
  }
  out.source.r = sec.real("r");
  out.source.R = sec.real("R");
  out.rho = sec.real("rho", out.rho);
  Section noise(sec.at("noise"), "problem.noise");
  noise.allow({"kind", "sigma", "half_width"});
  std::string kind = noise.text("kind");
  if (kind == "gaussian") {
    if (noise.has("half_width")) noise.fail("'half_width' applies to bounded_uniform noise only");
    out.noise = NoiseModel::gaussian(noise.real("sigma"));
  } else if (kind == "bounded_uniform") {
    if (noise.has("sigma")) noise.fail("'sigma' applies to gaussian noise only");
    out.noise = NoiseModel::bounded_uniform(noise.real("half_width"));
  } else {
    noise.fail("unknown noise kind '" + kind + "'");
  }
  if (!(out.noise.scale > 0.0)) noise.fail("noise scale must be positive");
  if (!(out.rho > 0.0)) sec.fail("'rho' must be positive");
  try {
    validate(out.source);
  } catch (const std::exception& e) {
    sec.fail(e.what());
  }
  return out;
}

std::vector<std::size_t> size_list(const Section& sec, const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& v : sec.array(key)) out.push_back(sec.as_uint(v, key));
  return out;
}

std::vector<double> real_list(const Section& sec, const std::string& key) {
  std::vector<double> out;
  for (const auto& v : sec.array(key)) out.push_back(sec.as_real(v, key));
  return out;
}

RateSettings rates_from_json(const json& node) {
  Section sec(node, "rates");
  sec.allow({"n_grid", "replicates", "s"});
  RateSettings out;
  out.n_grid = size_list(sec, "n_grid");
  out.replicates = sec.uint("replicates", out.replicates);
  out.s = sec.real("s", out.s);
  if (out.n_grid.empty()) sec.fail("'n_grid' is empty");
  for (std::size_t i = 1; i < out.n_grid.size(); ++i)
    if (out.n_grid[i] <= out.n_grid[i - 1]) sec.fail("'n_grid' must be strictly increasing");
  if (out.n_grid.front() < 2) sec.fail("'n_grid' entries must be at least 2");
  if (out.replicates < 20) sec.fail("'replicates' must be at least 20");
  if (!(out.s >= 0.0 && out.s <= 0.5)) sec.fail("'s' must lie in [0, 1/2]");
  return out;
}

FitSettings fit_from_json(const json& node) {
  Section sec(node, "fit");
  sec.allow({"n", "lambda", "data"});
  FitSettings out;
  out.n = sec.uint("n", 0);
  if (sec.has("lambda")) {
    double lambda = sec.real("lambda");
    if (!(lambda > 0.0 && lambda <= 1.0)) sec.fail("'lambda' must lie in (0, 1]");
    out.lambda = lambda;
  }
  if (sec.has("data")) out.data = sec.text("data");
  if (!out.data && out.n == 0) sec.fail("synthetic fit needs 'n' > 0");
  return out;
}

LowerBoundSettings lowerbound_from_json(const json& node) {
  Section sec(node, "lowerbound");
  sec.allow({"n", "s"});
  LowerBoundSettings out;
  out.n = sec.uint("n");
  if (out.n == 0) sec.fail("'n' must be positive");
  if (sec.has("s")) out.s_values = real_list(sec, "s");
  if (out.s_values.empty()) sec.fail("'s' is empty");
  for (double s : out.s_values)
    if (!(s >= 0.0 && s <= 0.5)) sec.fail("'s' entries must lie in [0, 1/2]");
  return out;
}

FilterCheckSettings filter_check_from_json(const json& node) {
  Section sec(node, "filter_check");
  sec.allow({"grid_size", "q_candidates"});
  FilterCheckSettings out;
  out.grid_size = sec.uint("grid_size", out.grid_size);
  if (sec.has("q_candidates")) out.q_candidates = real_list(sec, "q_candidates");
  if (out.grid_size < 1000) sec.fail("'grid_size' must be at least 1000");
  for (double q : out.q_candidates)
    if (!(q > 0.0)) sec.fail("'q_candidates' entries must be positive");
  return out;
}

}  // namespace

nlohmann::json profile_to_json(const SpectrumProfile& profile) {
  json out;
  out["kind"] = to_string(profile.kind());
  out["j0"] = profile.j0();
  out["nu_upper"] = profile.nu_upper();
  out["nu_lower"] = profile.nu_lower();
  switch (profile.kind()) {
    case ProfileKind::polynomial:
      out["b"] = profile.b();
      out["p"] = profile.size();
      break;
    case ProfileKind::polylog:
      out["b"] = profile.b();
      out["c"] = profile.c();
      out["d"] = profile.d();
      out["p"] = profile.size();
      break;
    case ProfileKind::plateau:
      out["levels"] = json::array();
      for (const auto& level : profile.levels()) out["levels"].push_back({level.value, level.run_length});
      break;
    case ProfileKind::regime_switch:
      out["breaks"] = json::array();
      for (const auto& br : profile.breaks()) out["breaks"].push_back({br.start, br.exponent});
      out["p"] = profile.size();
      break;
    case ProfileKind::explicit_values:
      out["values"] = std::vector<double>(profile.eigenvalues().begin(), profile.eigenvalues().end());
      break;
  }
  return out;
}

SpectrumProfile profile_from_json(const nlohmann::json& node) {
  Section sec(node, "spectrum");
  ProfileKind kind{};
  try {
    kind = profile_kind_from_string(sec.text("kind"));
  } catch (const ConfigError& e) {
    sec.fail(e.what());
  }
  try {
    switch (kind) {
      case ProfileKind::polynomial:
        sec.allow({"kind", "j0", "nu_upper", "nu_lower", "b", "p"});
        return SpectrumProfile::polynomial(sec.real("b"), sec.uint("p"), decay_from(sec));
      case ProfileKind::polylog:
        sec.allow({"kind", "j0", "nu_upper", "nu_lower", "b", "c", "d", "p"});
        return SpectrumProfile::polylog(sec.real("b"), sec.real("c"), sec.real("d"), sec.uint("p"),
                                        decay_from(sec));
      case ProfileKind::plateau: {
        sec.allow({"kind", "j0", "nu_upper", "nu_lower", "levels"});
        std::vector<PlateauLevel> levels;
        for (const auto& item : sec.array("levels")) {
          if (!item.is_array() || item.size() != 2) sec.fail("'levels' entries must be [value, run_length]");
          levels.push_back({sec.as_real(item[0], "levels"), sec.as_uint(item[1], "levels")});
        }
        return SpectrumProfile::plateau(std::move(levels), decay_from(sec));
      }
      case ProfileKind::regime_switch: {
        sec.allow({"kind", "j0", "nu_upper", "nu_lower", "breaks", "p"});
        std::vector<RegimeBreak> breaks;
        for (const auto& item : sec.array("breaks")) {
          if (!item.is_array() || item.size() != 2) sec.fail("'breaks' entries must be [start, exponent]");
          breaks.push_back({sec.as_uint(item[0], "breaks"), sec.as_real(item[1], "breaks")});
        }
        return SpectrumProfile::regime_switch(std::move(breaks), sec.uint("p"), decay_from(sec));
      }
      case ProfileKind::explicit_values:
        sec.allow({"kind", "j0", "nu_upper", "nu_lower", "values"});
        return SpectrumProfile::explicit_values(real_list(sec, "values"), decay_from(sec));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    sec.fail(e.what());
  }
  sec.fail("unreachable profile kind");
}

nlohmann::json filter_to_json(const FilterFamily& filter) {
  json out;
  out["kind"] = to_string(filter.kind());
  if (filter.kind() == FilterKind::landweber) out["step"] = filter.step();
  if (filter.kind() == FilterKind::iterated_tikhonov) out["m"] = filter.iterations();
  const auto& c = filter.constants();
  out["constants"] = {{"D", c.D}, {"E", c.E}, {"gamma0", c.gamma0},
                      {"qualification", c.qualification}, {"gamma_q", c.gamma_q}};
  return out;
}

FilterFamily filter_from_json(const nlohmann::json& node) {
  Section sec(node, "filter");
  sec.allow({"kind", "step", "m", "qualification", "constants"});
  std::optional<FilterFamily> filter;
  FilterKind kind{};
  try {
    kind = filter_kind_from_string(sec.text("kind"));
  } catch (const ConfigError& e) {
    sec.fail(e.what());
  }
  auto forbid = [&](const char* key) {
    if (sec.has(key)) sec.fail(std::string("'") + key + "' does not apply to " + to_string(kind));
  };
  try {
    switch (kind) {
      case FilterKind::tikhonov:
        forbid("step");
        forbid("m");
        forbid("qualification");
        filter = FilterFamily::tikhonov();
        break;
      case FilterKind::spectral_cutoff:
        forbid("step");
        forbid("m");
        filter = FilterFamily::spectral_cutoff(sec.real("qualification", 4.0));
        break;
      case FilterKind::landweber:
        forbid("m");
        filter = FilterFamily::landweber(sec.real("step", 1.0), sec.real("qualification", 4.0));
        break;
      case FilterKind::iterated_tikhonov: {
        forbid("step");
        forbid("qualification");
        auto m = sec.uint("m");
        if (m == 0 || m > 1000) sec.fail("'m' must lie in [1, 1000]");
        filter = FilterFamily::iterated_tikhonov(static_cast<unsigned>(m));
        break;
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    sec.fail(e.what());
  }
  if (sec.has("constants")) {
    Section cs(sec.at("constants"), "filter.constants");
    cs.allow({"D", "E", "gamma0", "qualification", "gamma_q"});
    FilterConstants c = filter->constants();
    c.D = cs.real("D", c.D);
    c.E = cs.real("E", c.E);
    c.gamma0 = cs.real("gamma0", c.gamma0);
    c.qualification = cs.real("qualification", c.qualification);
    c.gamma_q = cs.real("gamma_q", c.gamma_q);
    for (double v : {c.D, c.E, c.gamma0, c.qualification, c.gamma_q})
      if (!(v > 0.0)) cs.fail("declared constants must be positive");
    filter = filter->with_constants(c);
  }
  return *filter;
}

MercerProblem ExperimentConfig::make_problem() const {
  if (!problem) throw ConfigError("config has no 'problem' section");
  try {
    return MercerProblem::with_default_source(profile, problem->basis, problem->source, problem->rho,
                                              problem->noise);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

std::vector<std::string> ExperimentConfig::header() const {
  return {"config_hash=" + hash, "seed=" + std::to_string(seed)};
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Section top(doc, "config");
  top.allow({"seed", "spectrum", "problem", "filter", "rates", "fit", "lowerbound", "filter_check",
             "output"});
  const std::uint64_t seed = top.uint("seed");
  SpectrumProfile profile = profile_from_json(top.at("spectrum"));
  ExperimentConfig config{.source = doc,
                          .hash = hex64(fnv1a64(doc.dump())),
                          .seed = seed,
                          .profile = std::move(profile)};
  if (top.has("problem")) config.problem = problem_from_json(top.at("problem"));
  if (top.has("filter")) config.filter = filter_from_json(top.at("filter"));
  if (top.has("rates")) config.rates = rates_from_json(top.at("rates"));
  if (top.has("fit")) config.fit = fit_from_json(top.at("fit"));
  if (top.has("lowerbound")) config.lowerbound = lowerbound_from_json(top.at("lowerbound"));
  if (top.has("filter_check")) config.filter_check = filter_check_from_json(top.at("filter_check"));
  if (top.has("output")) {
    Section out(top.at("output"), "output");
    out.allow({"dir"});
    config.output_dir = out.text("dir");
  }
  if (config.problem) (void)config.make_problem();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace specreg
