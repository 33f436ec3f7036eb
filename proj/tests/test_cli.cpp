#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pe/config.hpp"
#include "pe/csv.hpp"
#include "pe/errors.hpp"
#include "pe/experiment.hpp"

using namespace pe;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "gas": {"gamma": 1.4, "rho_bar": 1.0},
  "domain": {"length": 1.0, "period": 4.0},
  "damping": {"kind": "constant", "beta0": -0.5},
  "forcing": {"kappa1": 0.3, "kappa2": 0.3}
})";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pe_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string with(const std::string& from, const std::string& to) {
  std::string s = kMinimal;
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

ExperimentConfig small(RunMode mode, const fs::path& dir) {
  ExperimentConfig c = parse_config_text(kMinimal);
  c.forcing.phi1b.sin = {0.01};
  c.forcing.phi2b.cos = {0.01};
  c.grid.nt = 16;
  c.grid.nx = 16;
  c.run.mode = mode;
  c.run.tol = 1e-10;
  c.output.directory = dir.string();
  return c;
}

} // namespace

TEST_CASE("minimal config gets documented defaults") {
  const ExperimentConfig c = parse_config_text(kMinimal);
  CHECK(c.gas.gamma == 1.4);
  CHECK(c.grid.nt == 128);
  CHECK(c.grid.nx == 128);
  CHECK(c.grid.substeps == 4);
  CHECK(c.grid.interpolation_order == 3);
  CHECK(c.run.mode == RunMode::validate);
  CHECK(c.run.max_iter == 60);
  CHECK(c.run.bump_amplitude == 0.005);
  CHECK(c.output.directory == "out");
  CHECK(c.threads == 1);
  CHECK(c.boundary_forcing().is_zero());
}

TEST_CASE("config rejections name the violated invariant") {
  const std::string k = error_of(with("\"kappa1\": 0.3", "\"kappa1\": 1.5"));
  CHECK(k.find("|kappa1| < 1") != std::string::npos);
  const std::string b = error_of(with("\"beta0\": -0.5", "\"beta0\": 0.2"));
  CHECK(b.find("beta <= 0") != std::string::npos);
  const std::string u = error_of(with("\"rho_bar\": 1.0", "\"rho_bar\": 1.0, \"gama\": 1.4"));
  CHECK(u.find("gas.gama") != std::string::npos);
  const std::string m = error_of(with("\"gamma\": 1.4, ", ""));
  CHECK(m.find("gas.gamma") != std::string::npos);
  const std::string p = error_of(with("\"period\": 4.0", "\"period\": 4.0,"));
  CHECK(p.find("line 3") != std::string::npos);
  CHECK_FALSE(error_of(with("\"length\": 1.0", "\"length\": -1.0")).empty());
  CHECK_FALSE(error_of(with("\"kappa2\": 0.3", "\"kappa2\": -1.0")).empty());
  CHECK_THROWS_AS(parse_config("/nonexistent/pe.json"), ConfigError);
}

TEST_CASE("config echo round trips") {
  ExperimentConfig c = parse_config_text(kMinimal);
  c.forcing.phi1b.sin = {0.01, 0.002};
  c.run.sweep_values = {0.0, -0.5};
  const nlohmann::json j = config_to_json(c);
  CHECK(config_to_json(config_from_json(j)) == j);
}

TEST_CASE("mode names") {
  for (RunMode m : {RunMode::validate, RunMode::periodic, RunMode::ibvp, RunMode::stability,
                    RunMode::sweep, RunMode::oracle})
    CHECK(parse_mode(to_string(m)) == m);
  CHECK_FALSE(parse_mode("plot").has_value());
}

TEST_CASE("field CSV layout and round trip") {
  const fs::path dir = scratch("field");
  const Equilibrium eq = make_equilibrium(1.0, 1.4, 0.1);
  PeriodicField zero(2, 2, 4.0, 1.0);
  emit_field_csv(zero, eq, (dir / "zero.csv").string());
  const auto z = lines(dir / "zero.csv");
  REQUIRE(z.size() == 5);
  CHECK(z[0] == "t,x,phi1,phi2,m,n,rho,u");
  for (std::size_t i = 1; i < z.size(); ++i) {
    CHECK(z[i].find(",0,0,") != std::string::npos);
    CHECK(z[i].substr(z[i].size() - 4) == ",1,0");
    CHECK(z[i].back() != ',');
  }
  CHECK(z[1].substr(0, 4) == "0,0,");
  CHECK(z[2].substr(0, 4) == "0,1,");
  CHECK(slurp(dir / "zero.csv").find('\r') == std::string::npos);

  PeriodicField f(8, 5, 4.0, 1.0);
  for (int j = 0; j < 8; ++j)
    for (int k = 0; k < 5; ++k) {
      f(0, j, k) = 0.01 * std::sin(0.3 * j + k) / 3.0;
      f(1, j, k) = -0.007 * std::cos(0.2 * j * k) / 7.0;
    }
  emit_field_csv(f, eq, (dir / "f.csv").string());
  const PeriodicField back = read_field_csv((dir / "f.csv").string(), 4.0);
  CHECK(back.nt() == 8);
  CHECK(back.nx() == 5);
  CHECK(back.sup_diff(f) == 0.0);
  CHECK_THROWS_AS(emit_field_csv(f, eq, (dir / "missing" / "f.csv").string()), IoError);
}

TEST_CASE("report CSVs") {
  const fs::path dir = scratch("reports");
  ConvergenceReport c;
  c.diffs = {1.0, 0.5, 0.25};
  c.theta_estimates = {{2, 0.5}, {3, 0.5}};
  emit_report_csv(c, (dir / "conv.csv").string());
  const auto cl = lines(dir / "conv.csv");
  REQUIRE(cl.size() == 4);
  CHECK(cl[0] == "iter,sup_diff,theta_est");
  CHECK(cl[1] == "1,1,nan");
  CHECK(cl[2] == "2,0.5,0.5");
  CHECK(cl[3] == "3,0.25,0.5");

  StabilityReport s;
  s.window_sup_c0 = {1.0, 0.5, 0.25, 0.125, 0.0625};
  s.window_sup_c1 = {2.0, 1.0, 0.5, 0.25, 0.125};
  s.ratio_c0 = {std::nan(""), 0.5, 0.5, 0.5, 0.5};
  s.ratio_c1 = s.ratio_c0;
  emit_report_csv(s, (dir / "stab.csv").string());
  const auto sl = lines(dir / "stab.csv");
  REQUIRE(sl.size() == 6);
  CHECK(sl[0] == "window,sup_c0,sup_c1,ratio_c0,ratio_c1");
  CHECK(sl[1] == "0,1,2,nan,nan");
  CHECK(sl[5] == "4,0.0625,0.125,0.5,0.5");

  RegularityReport r;
  r.stencils = {"d2t", "dtdx", "d2x"};
  r.sup_coarse = {1.0, 2.0, 3.0};
  r.sup_fine = {1.0, 2.0, 3.3};
  r.refinement_ratios = {1.0, 1.0, 1.1};
  emit_report_csv(r, (dir / "reg.csv").string());
  const auto rl = lines(dir / "reg.csv");
  REQUIRE(rl.size() == 4);
  CHECK(rl[0] == "stencil,sup_coarse,sup_fine,ratio");
  CHECK(rl[3].substr(0, 4) == "d2x,");
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("sha256 of known content") {
  const fs::path dir = scratch("sha");
  std::ofstream(dir / "abc") << "abc";
  CHECK(sha256_file((dir / "abc").string()) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("validate mode passes on a valid config") {
  const fs::path dir = scratch("validate");
  const RunResult r = run(small(RunMode::validate, dir));
  CHECK(r.exit_code == exit_ok);
  CHECK(r.manifest["all_checks_passed"] == true);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("periodic mode with zero forcing") {
  const fs::path dir = scratch("zero");
  ExperimentConfig c = small(RunMode::periodic, dir);
  c.forcing.phi1b = {};
  c.forcing.phi2b = {};
  const RunResult r = run(c);
  CHECK(r.exit_code == exit_ok);
  CHECK(r.manifest["results"]["convergence"]["iterations_used"] == 1);
  const PeriodicField f = read_field_csv((dir / "periodic_field.csv").string(), 4.0);
  CHECK(f.sup_norm() == 0.0);
}

TEST_CASE("identical configs give byte-identical artifacts") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  ExperimentConfig c = small(RunMode::periodic, a);
  const RunResult ra = run(c);
  c.output.directory = b.string();
  c.threads = 3;
  const RunResult rb = run(c);
  REQUIRE(ra.artifacts.size() == rb.artifacts.size());
  REQUIRE_FALSE(ra.artifacts.empty());
  for (std::size_t i = 0; i < ra.artifacts.size(); ++i) {
    CHECK(slurp(a / ra.artifacts[i].path) == slurp(b / rb.artifacts[i].path));
    CHECK(ra.artifacts[i].sha256 == rb.artifacts[i].sha256);
  }
}

TEST_CASE("manifest lists every artifact with its digest") {
  const fs::path dir = scratch("manifest");
  const RunResult r = run(small(RunMode::ibvp, dir));
  CHECK(r.exit_code == exit_ok);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  std::size_t listed = 0;
  for (const auto& a : m["artifacts"]) {
    const fs::path p = dir / a["path"].get<std::string>();
    CHECK(sha256_file(p.string()) == a["sha256"].get<std::string>());
    CHECK(fs::file_size(p) == a["bytes"].get<std::uintmax_t>());
    ++listed;
  }
  std::size_t on_disk = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "manifest.json") ++on_disk;
  CHECK(listed == on_disk);
  // the echoed config re-parses to the same config
  CHECK(config_to_json(config_from_json(m["config"])) == m["config"]);
  CHECK(m.contains("timings_seconds"));
  CHECK(m["versions"]["pe"] == kVersion);
}

TEST_CASE("exit codes") {
  ExperimentConfig bad = small(RunMode::periodic, scratch("bad"));
  bad.damping.beta0 = 0.2;
  CHECK(run(bad).exit_code == exit_config);

  ExperimentConfig slow = small(RunMode::periodic, scratch("slow"));
  slow.run.max_iter = 2;
  CHECK(run(slow).exit_code == exit_nonconvergence);

  RunOverrides o;
  o.grid_scale = 2;
  o.mode = RunMode::validate;
  const ExperimentConfig scaled = apply_overrides(small(RunMode::periodic, scratch("o")), o);
  CHECK(scaled.grid.nt == 32);
  CHECK(scaled.run.mode == RunMode::validate);
  o.grid_scale = 0;
  CHECK_THROWS_AS(apply_overrides(scaled, o), ConfigError);
}
