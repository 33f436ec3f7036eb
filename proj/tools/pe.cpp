#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pe/config.hpp"
#include "pe/errors.hpp"
#include "pe/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Time-periodic solutions of the damped isentropic Euler equations"};
  app.set_version_flag("--version", std::string(pe::kVersion));
  std::string mode;
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  int grid_scale = 1;
  app.add_option("mode", mode, "validate | periodic | ibvp | stability | sweep | oracle")
      ->required()
      ->check(CLI::IsMember({"validate", "periodic", "ibvp", "stability", "sweep", "oracle"}));
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_option("--threads", threads, "worker threads for the solvers")->check(CLI::PositiveNumber);
  app.add_option("--grid-scale", grid_scale, "multiply nt and nx by k")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? pe::exit_ok : pe::exit_config;
  }

  try {
    pe::RunOverrides o;
    o.mode = pe::parse_mode(mode);
    if (!out_dir.empty()) o.out_dir = out_dir;
    if (threads > 0) o.threads = threads;
    o.grid_scale = grid_scale;
    const pe::ExperimentConfig cfg = pe::apply_overrides(pe::parse_config(config_path), o);
    const pe::RunResult r = pe::run(cfg);
    for (const auto& c : r.checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    std::cout << "status: " << r.status << "\nmanifest: " << r.manifest_path << '\n';
    if (r.exit_code != pe::exit_ok) std::cerr << "pe: " << r.status << '\n';
    return r.exit_code;
  } catch (const pe::ConfigError& e) {
    std::cerr << "pe: config error: " << e.what() << '\n';
    return pe::exit_config;
  } catch (const std::exception& e) {
    std::cerr << "pe: internal error: " << e.what() << '\n';
    return pe::exit_internal;
  }
}
