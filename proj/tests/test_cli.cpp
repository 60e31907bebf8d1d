#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "specreg/cli.hpp"
#include "specreg/errors.hpp"

using namespace specreg;
namespace fs = std::filesystem;

namespace {

const char* kPoly = R"({"seed": 7,
 "spectrum": {"kind": "polynomial", "b": 2, "p": 300, "j0": 1, "nu_upper": 2, "nu_lower": 2},
 "problem": {"basis": "fourier", "r": 0.5, "R": 1, "rho": 0.5, "noise": {"kind": "gaussian", "sigma": 0.1}},
 "fit": {"n": 100},
 "rates": {"n_grid": [32, 64, 128], "replicates": 20, "s": 0.5},
 "lowerbound": {"n": 100, "s": [0.5]}
})";

const char* kGeometric = R"({"seed": 1,
 "spectrum": {"kind": "explicit", "values": [1, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125,
   0.00390625, 0.001953125, 0.0009765625, 0.00048828125, 0.000244140625, 0.0001220703125, 6.103515625e-05,
   3.0517578125e-05], "j0": 1, "nu_upper": 1, "nu_lower": 1},
 "problem": {"r": 0.5, "R": 1, "noise": {"kind": "gaussian", "sigma": 0.1}},
 "lowerbound": {"n": 100}
})";

// mu_2j / mu_j = 1 on the plateau: EIGUP fails.
const char* kFlat = R"({"seed": 1,
 "spectrum": {"kind": "plateau", "levels": [[1, 8], [0.01, 8]], "j0": 1, "nu_upper": 1, "nu_lower": 10},
 "problem": {"r": 0.5, "R": 1, "noise": {"kind": "gaussian", "sigma": 0.1}},
 "rates": {"n_grid": [32, 64], "replicates": 20}
})";

struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("specreg_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(dir / file) << text;
    return dir / file;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
  return files;
}

int run(const std::string& cmd, const fs::path& config, const fs::path& out, unsigned jobs = 1,
        std::string* log_text = nullptr) {
  CommandOptions opt;
  opt.config_path = config.string();
  opt.out_dir = out.string();
  opt.jobs = jobs;
  std::ostringstream log;
  int code = run_command(cmd, opt, log);
  if (log_text) *log_text = log.str();
  return code;
}

}  // namespace

TEST_CASE("config parsing") {
  auto cfg = parse_config(kPoly);
  CHECK(cfg.seed == 7);
  CHECK(cfg.profile.size() == 300);
  CHECK(cfg.header()[1] == "seed=7");
  CHECK(cfg.header()[0].rfind("config_hash=", 0) == 0);
  CHECK(parse_config(kPoly).hash == cfg.hash);
  CHECK(cfg.rates->n_grid.size() == 3);

  CHECK_THROWS_AS(parse_config(R"({"spectrum": {"kind": "polynomial", "b": 2, "p": 10, "j0": 1, "nu_upper": 2, "nu_lower": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "bogus": 1, "spectrum": {"kind": "polynomial", "b": 2, "p": 10, "j0": 1, "nu_upper": 2, "nu_lower": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "spectrum": {"kind": "polynomial", "b": 2, "p": 10, "j0": 1, "nu_upper": 2, "nu_lower": 2, "extra": 0}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "spectrum": {"kind": "polynomial", "b": -2, "p": 10, "j0": 1, "nu_upper": 2, "nu_lower": 2}})"),
                  ConfigError);
}

TEST_CASE("profile and filter json round trip") {
  for (const auto& prof : {SpectrumProfile::polynomial(2.0, 50, {1, 2.0, 2.0}),
                           SpectrumProfile::polylog(2.0, 1.0, 1.0, 50, {8, 1.1, 1.8}),
                           SpectrumProfile::plateau({{1.0, 3}, {0.1, 4}}, {1, 1.0, 4.0, DecayCheck::report_only})}) {
    auto back = profile_from_json(profile_to_json(prof));
    CHECK(std::ranges::equal(back.eigenvalues(), prof.eigenvalues()));
    CHECK(back.j0() == prof.j0());
  }
  for (const auto& f : {FilterFamily::tikhonov(), FilterFamily::landweber(0.5),
                        FilterFamily::iterated_tikhonov(3), FilterFamily::spectral_cutoff()}) {
    auto back = filter_from_json(filter_to_json(f));
    CHECK(back.kind() == f.kind());
    CHECK(back.g(0.1, 0.3) == f.g(0.1, 0.3));
  }
}

TEST_CASE("missing files and sections map to exit 2") {
  Workspace ws("cfg");
  CHECK(run("fit", ws.dir / "missing.json", ws.dir / "o") == kExitConfig);
  auto bad = ws.write("bad.json", R"({"spectrum": {"kind": "polynomial", "b": 2, "p": 10, "j0": 1, "nu_upper": 2, "nu_lower": 2}})");
  CHECK(run("spectrum-report", bad, ws.dir / "o") == kExitConfig);
  auto geo = ws.write("geo.json", kGeometric);
  CHECK(run("rates", geo, ws.dir / "o") == kExitConfig);
  CHECK(run("nonsense", geo, ws.dir / "o") == kExitConfig);
}

TEST_CASE("spectrum-report and headers") {
  Workspace ws("spec");
  auto cfg = ws.write("poly.json", kPoly);
  REQUIRE(run("spectrum-report", cfg, ws.dir / "o") == kExitOk);
  auto files = read_tree(ws.dir / "o");
  const std::string hash = parse_config(kPoly).hash;
  for (const char* name : {"spectrum.csv", "effdim.csv", "ginverse.csv", "spectrum_summary.txt"}) {
    REQUIRE(files.count(name) == 1);
    CHECK(files[name].rfind("# config_hash=" + hash + "\n# seed=7\n", 0) == 0);
  }
  CHECK(files["spectrum.csv"].find("t,F,G\n") != std::string::npos);
  CHECK(files["spectrum_summary.txt"].find("FAIL") == std::string::npos);
}

TEST_CASE("hypothesis gates") {
  Workspace ws("gate");
  auto geo = ws.write("geo.json", kGeometric);
  std::string log;
  CHECK(run("spectrum-report", geo, ws.dir / "o", 1, &log) == kExitOk);
  CHECK(log.find("EIGLOW fails") != std::string::npos);
  // Geometric decay: mu_2j/mu_j = 2^-j, far below 2^-1 for large j, so EIGLOW fails.
  auto summary = slurp(ws.dir / "o" / "spectrum_summary.txt");
  CHECK(summary.find("eiglow") != std::string::npos);
  CHECK(run("lowerbound", geo, ws.dir / "o2", 1, &log) == kExitHypothesis);
  CHECK(log.find("EIGLOW") != std::string::npos);

  auto flat = ws.write("flat.json", kFlat);
  CHECK(run("rates", flat, ws.dir / "o3", 1, &log) == kExitHypothesis);
  CHECK(log.find("EIGUP") != std::string::npos);
}

TEST_CASE("fit with data files") {
  Workspace ws("fit");
  auto cfg = ws.write("poly.json", kPoly);
  auto good = ws.write("good.csv", "x,y\n0.1,0.5\n0.4,-0.2\n0.7,0.3\n");
  auto malformed = ws.write("bad.csv", "x,y\n0.1,0.5\n0.4;oops\n");
  auto empty = ws.write("empty.csv", "x,y\n");

  CommandOptions opt;
  opt.config_path = cfg.string();
  opt.out_dir = (ws.dir / "o").string();
  std::ostringstream log;
  opt.data_path = good.string();
  CHECK(run_command("fit", opt, log) == kExitOk);
  auto meta = slurp(ws.dir / "o" / "fit_metadata.csv");
  CHECK(meta.find("lambda_source,lambda_rule\n") != std::string::npos);
  CHECK(meta.find("data,file\n") != std::string::npos);
  CHECK(meta.find("n,3\n") != std::string::npos);
  CHECK_FALSE(fs::exists(ws.dir / "o" / "fit_errors.csv"));

  opt.data_path = malformed.string();
  CHECK(run_command("fit", opt, log) == kExitData);
  opt.data_path = empty.string();
  CHECK(run_command("fit", opt, log) == kExitData);
  opt.data_path = (ws.dir / "nope.csv").string();
  CHECK(run_command("fit", opt, log) == kExitData);

  opt.data_path.reset();
  CHECK(run_command("fit", opt, log) == kExitOk);
  CHECK(slurp(ws.dir / "o" / "fit_errors.csv").find("s,error_norm\n") != std::string::npos);
}

TEST_CASE("outputs are identical across runs and job counts") {
  Workspace ws("det");
  auto cfg = ws.write("poly.json", kPoly);
  for (const char* cmd : {"spectrum-report", "fit", "rates", "lowerbound", "filter-check"}) {
    CAPTURE(cmd);
    REQUIRE(run(cmd, cfg, ws.dir / "a", 1) == kExitOk);
    REQUIRE(run(cmd, cfg, ws.dir / "b", 8) == kExitOk);
    REQUIRE(run(cmd, cfg, ws.dir / "c", 1) == kExitOk);
  }
  auto a = read_tree(ws.dir / "a");
  CHECK(a.size() >= 12);
  CHECK(a == read_tree(ws.dir / "b"));
  CHECK(a == read_tree(ws.dir / "c"));
  for (const auto& [name, text] : a) {
    CAPTURE(name);
    CHECK(text.find("config_hash=") != std::string::npos);
    CHECK(text.find("seed=7") != std::string::npos);
  }
}

TEST_CASE("binary: argument errors and svg") {
  const std::string bin = SPECREG_CLI_PATH;
  Workspace ws("bin");
  auto cfg = ws.write("poly.json", kPoly);
  auto sh = [](const std::string& cmd) {
    int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(sh(bin) == 2);
  CHECK(sh(bin + " fit") == 2);
  CHECK(sh(bin + " rates --config " + cfg.string() + " --jobs 0") == 2);
  CHECK(sh(bin + " --help") == 0);
  CHECK(sh(bin + " rates --config " + cfg.string() + " --jobs 2 --svg --out " + (ws.dir / "o").string()) == 0);
  auto svg = slurp(ws.dir / "o" / "rates.svg");
  CHECK(svg.rfind("<!-- config_hash=", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
}
