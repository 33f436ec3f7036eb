#include "pe/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include "pe/analysis.hpp"
#include "pe/csv.hpp"
#include "pe/errors.hpp"
#include "pe/ibvp.hpp"
#include "pe/periodic.hpp"

namespace pe {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256: digest initialisation failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

ExperimentConfig apply_overrides(ExperimentConfig config, const RunOverrides& o) {
  if (o.mode) config.run.mode = *o.mode;
  if (o.out_dir) config.output.directory = *o.out_dir;
  if (o.threads) config.threads = *o.threads;
  if (o.grid_scale < 1) throw ConfigError("--grid-scale must be >= 1");
  config.grid.nt *= o.grid_scale;
  config.grid.nx *= o.grid_scale;
  validate_config(config);
  return config;
}

namespace {

// Raised inside a mode to map onto an exit code while keeping partial output.
struct ModeFailure {
  int code;
  std::string message;
};

class Session {
public:
  explicit Session(const ExperimentConfig& config) : cfg_(config), dir_(config.output.directory) {
    fs::create_directories(dir_);
  }

  void check(const std::string& name, bool passed, const std::string& detail) {
    checks_.push_back({name, passed, detail});
  }

  template <class Fn>
  auto timed(const std::string& phase, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      timings_[phase] = timings_.value(phase, 0.0) +
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      finish();
    } else {
      auto r = fn();
      finish();
      return r;
    }
  }

  // Writes one artifact through `writer(path)` when CSV output is enabled.
  void artifact(const std::string& name, bool enabled,
                const std::function<void(const std::string&)>& writer) {
    if (!enabled) return;
    const std::string path = (fs::path(dir_) / name).string();
    writer(path);
    artifacts_.push_back({name, sha256_file(path), fs::file_size(path)});
  }

  [[nodiscard]] const CheckResult* first_failure() const {
    for (const auto& c : checks_)
      if (!c.passed) return &c;
    return nullptr;
  }

  json& results() { return results_; }
  const ExperimentConfig& config() const { return cfg_; }
  bool csv() const { return cfg_.output.emit_csv; }
  bool fields() const { return cfg_.output.emit_fields && cfg_.output.emit_csv; }

  RunResult finish(int code, const std::string& status) {
    RunResult r;
    r.exit_code = code;
    r.status = status;
    r.checks = checks_;
    r.artifacts = artifacts_;
    json checks = json::array();
    for (const auto& c : checks_)
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    json artifacts = json::array();
    for (const auto& a : artifacts_)
      artifacts.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    r.manifest = {
        {"tool", "pe"},
        {"mode", to_string(cfg_.run.mode)},
        {"status", status},
        {"exit_code", code},
        {"config", config_to_json(cfg_)},
        {"versions",
         {{"pe", kVersion},
          {"compiler", __VERSION__},
          {"cxx_standard", static_cast<long>(__cplusplus)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"openssl", OPENSSL_VERSION_TEXT}}},
        {"timings_seconds", timings_},
        {"checks", checks},
        {"all_checks_passed", std::all_of(checks_.begin(), checks_.end(),
                                          [](const CheckResult& c) { return c.passed; })},
        {"results", results_},
        {"artifacts", artifacts},
    };
    r.manifest_path = (fs::path(dir_) / "manifest.json").string();
    std::ofstream out(r.manifest_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + r.manifest_path + "' for writing");
    out << r.manifest.dump(2) << '\n';
    if (!out) throw IoError("write to '" + r.manifest_path + "' failed");
    return r;
  }

private:
  const ExperimentConfig& cfg_;
  std::string dir_;
  std::vector<CheckResult> checks_;
  std::vector<Artifact> artifacts_;
  json timings_ = json::object();
  json results_ = json::object();
};

std::string fmt(double v) { return format_number(v); }

json convergence_json(const ConvergenceReport& r) {
  return {{"iterations_used", r.iterations_used}, {"converged", r.converged},
          {"tol", r.tol},                         {"theta", r.theta},
          {"final_c0_norm", r.final_c0_norm},     {"final_c1_norm", r.final_c1_norm},
          {"last_diff", r.diffs.empty() ? 0.0 : r.diffs.back()}};
}

double max_theta(const ConvergenceReport& r) {
  double m = 0.0;
  for (const auto& p : r.theta_estimates) m = std::max(m, p.second);
  return m;
}

// Solves the periodic problem, emitting the convergence report either way.
PeriodicSolution solve_and_report(Session& s, const ExperimentConfig& cfg, const std::string& tag) {
  const Equilibrium eq = cfg.equilibrium();
  const BoundaryForcing forcing = cfg.boundary_forcing();
  const DampingField damping = cfg.damping_field();
  try {
    PeriodicSolution sol =
        s.timed("periodic" + tag, [&] { return solve_periodic(forcing, damping, eq, cfg.iteration()); });
    s.artifact("convergence" + tag + ".csv", s.csv(),
               [&](const std::string& p) { emit_report_csv(sol.report, p); });
    s.results()["convergence" + tag] = convergence_json(sol.report);
    return sol;
  } catch (const SolverError& e) {
    s.artifact("convergence" + tag + ".csv", s.csv(),
               [&](const std::string& p) { emit_report_csv(e.report(), p); });
    s.results()["convergence" + tag] = convergence_json(e.report());
    s.check("periodic_converged" + tag, false, e.what());
    throw ModeFailure{exit_nonconvergence, e.what()};
  } catch (const CorrectorError& e) {
    s.check("periodic_converged" + tag, false, e.what());
    throw ModeFailure{exit_nonconvergence, e.what()};
  } catch (const AdmissibilityError& e) {
    s.check("periodic_converged" + tag, false, e.what());
    throw ModeFailure{exit_nonconvergence, e.what()};
  }
}

struct StabilityRun {
  PeriodicSolution periodic;
  StabilityReport report;
  double window = 0.0;
};

Trajectory run_ibvp(Session& s, const ExperimentConfig& cfg, const InitialData& init,
                    double window, const std::string& phase) {
  IbvpOptions o;
  o.horizon = cfg.run.horizon_periods * cfg.domain.period;
  o.snapshot_every = window / cfg.run.snapshots_per_window;
  o.cfl_fraction = cfg.run.cfl_fraction;
  o.frozen = cfg.run.frozen;
  o.threads = cfg.threads;
  try {
    return s.timed(phase, [&] {
      return solve_ibvp(init, cfg.boundary_forcing(), cfg.damping_field(), cfg.equilibrium(), o);
    });
  } catch (const AdmissibilityError& e) {
    s.check(phase + "_completed", false, e.what());
    throw ModeFailure{exit_nonconvergence, e.what()};
  } catch (const CflError& e) {
    s.check(phase + "_completed", false, e.what());
    throw ModeFailure{exit_nonconvergence, e.what()};
  }
}

bool ratios_below_one(const std::vector<double>& ratios) {
  bool any = false;
  for (double r : ratios) {
    if (std::isnan(r)) continue;
    any = true;
    if (!(r < 1.0)) return false;
  }
  return any;
}

StabilityRun stability_pipeline(Session& s, const ExperimentConfig& cfg, const std::string& tag) {
  StabilityRun out;
  out.periodic = solve_and_report(s, cfg, tag);
  const Equilibrium eq = cfg.equilibrium();
  out.window = window_length(eq, cfg.domain.length, cfg.run.frozen);
  const Trajectory base =
      run_ibvp(s, cfg, compatible_initial_data(out.periodic.field, 0.0), out.window, "ibvp_base" + tag);
  const Trajectory pert = run_ibvp(
      s, cfg, compatible_initial_data(out.periodic.field, cfg.run.bump_amplitude), out.window,
      "ibvp_perturbed" + tag);
  std::vector<double> times;
  for (const auto& sn : pert.snapshots) times.push_back(sn.t);
  const auto d0 = distance_between(pert, base);
  const auto d1 = c1_distance_between(pert, base);
  const auto floor_dist = distance_to_periodic(base, out.periodic.field);
  const double scale = std::max(1.0, out.periodic.field.sup_norm() + cfg.run.bump_amplitude);
  const double error_floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  try {
    out.report = fit_stability(times, d0, d1, out.window, error_floor);
  } catch (const InsufficientDataError& e) {
    s.check("stability_windows" + tag, false, e.what());
    throw ModeFailure{exit_check_failure, e.what()};
  }
  s.artifact("stability" + tag + ".csv", s.csv(),
             [&](const std::string& p) { emit_report_csv(out.report, p); });
  s.artifact("distance" + tag + ".csv", s.csv(), [&](const std::string& p) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < times.size(); ++i)
      rows.push_back({fmt(times[i]), fmt(d0[i]), fmt(d1[i]), fmt(floor_dist[i])});
    emit_table_csv({"t", "dist_c0", "dist_c1", "base_to_periodic"}, rows, p);
  });

  const StabilityReport& r = out.report;
  const int windows = static_cast<int>(r.window_sup_c0.size());
  s.check("stability_windows" + tag, windows >= 8, "windows = " + std::to_string(windows));
  s.check("c0_monotone_after_first_window" + tag,
          r.monotone_after_c0.has_value() && *r.monotone_after_c0 <= 1,
          "monotone_after = " + (r.monotone_after_c0 ? std::to_string(*r.monotone_after_c0) : "none"));
  s.check("c0_window_ratios_below_one" + tag, ratios_below_one(r.ratio_c0), "xi_c0 = " + fmt(r.xi_c0));
  s.check("c1_window_ratios_below_one" + tag, ratios_below_one(r.ratio_c1), "xi_c1 = " + fmt(r.xi_c1));
  const bool reflection = cfg.run.frozen && cfg.damping_field().is_zero();
  if (reflection && cfg.forcing.kappa1 * cfg.forcing.kappa2 != 0.0) {
    const double q = std::abs(cfg.forcing.kappa1 * cfg.forcing.kappa2);
    s.check("reflection_two_window_rate" + tag, std::abs(r.xi2_c0 - q) <= 0.1 * q,
            "xi2_c0 = " + fmt(r.xi2_c0) + ", |kappa1 kappa2| = " + fmt(q));
    s.check("c1_rate_matches_c0" + tag, std::abs(r.xi2_c1 - r.xi2_c0) <= 0.15 * r.xi2_c0,
            "xi2_c1 = " + fmt(r.xi2_c1) + ", xi2_c0 = " + fmt(r.xi2_c0));
  }
  s.results()["stability" + tag] = {
      {"window_length", r.window_length}, {"windows", windows},
      {"xi_c0", r.xi_c0},                 {"xi_c1", r.xi_c1},
      {"xi2_c0", r.xi2_c0},               {"xi2_c1", r.xi2_c1},
      {"error_floor", r.error_floor},
      {"max_base_to_periodic", *std::max_element(floor_dist.begin(), floor_dist.end())}};
  return out;
}

void mode_validate(Session& s) {
  const ExperimentConfig& cfg = s.config();
  const Equilibrium eq = cfg.equilibrium();
  const DampingField damping = cfg.damping_field();
  const BoundaryForcing forcing = cfg.boundary_forcing();
  const HypothesisReport h = s.timed("hypothesis", [&] {
    return validate_hypothesis(damping, cfg.grid.nt, cfg.grid.nx);
  });
  std::string detail = "min beta = " + fmt(h.min_beta) + ", max beta = " + fmt(h.max_beta);
  for (const auto& v : h.violations) detail += "; " + v;
  s.check("damping_hypothesis", h.passed, detail);
  s.check("neighborhood_subsonic", eq.A0 >= 1.0 / eq.c_bar && std::isfinite(eq.A0),
          "A0 = " + fmt(eq.A0) + ", radius = " + fmt(eq.neighborhood_radius));
  const C1Norm n = boundary_c1_norm(forcing, 4096);
  s.check("forcing_c1_bound", n.certified >= n.sampled,
          "sampled = " + fmt(n.sampled) + ", certified = " + fmt(n.certified));
  s.check("reflection_dissipative",
          std::abs(forcing.kappa1) < 1.0 && std::abs(forcing.kappa2) < 1.0,
          "kappa1 = " + fmt(forcing.kappa1) + ", kappa2 = " + fmt(forcing.kappa2));
  s.results()["equilibrium"] = {{"c_bar", eq.c_bar}, {"m_bar", eq.m_bar}, {"n_bar", eq.n_bar},
                                {"A0", eq.A0}, {"neighborhood_radius", eq.neighborhood_radius}};
  s.results()["forcing_c1"] = {{"sampled", n.sampled}, {"certified", n.certified}};
  s.results()["weight_bound_M0"] = weight_bound(damping, eq);
  if (!h.passed) throw ModeFailure{exit_config, "damping hypothesis violated"};
}

void mode_periodic(Session& s) {
  const ExperimentConfig& cfg = s.config();
  const PeriodicSolution sol = solve_and_report(s, cfg, "");
  const Equilibrium eq = cfg.equilibrium();
  const PdeResidual res = s.timed("residual", [&] {
    return pde_residual(sol.field, cfg.boundary_forcing(), cfg.damping_field(), eq, cfg.run.frozen);
  });
  s.check("periodic_converged", sol.report.converged,
          "iterations = " + std::to_string(sol.report.iterations_used));
  s.check("successive_diff_ratios_below_one", max_theta(sol.report) < 1.0,
          "max ratio = " + fmt(max_theta(sol.report)));
  s.results()["pde_residual"] = {{"residual1", res.residual1},
                                 {"residual2", res.residual2},
                                 {"boundary_mismatch", res.boundary_mismatch}};
  if (!cfg.run.frozen)
    s.results()["euler_residual"] = euler_residual(sol.field, eq, cfg.damping_field()).residual();
  s.artifact("periodic_field.csv", s.fields(),
             [&](const std::string& p) { emit_field_csv(sol.field, eq, p); });
}

void mode_ibvp(Session& s) {
  const ExperimentConfig& cfg = s.config();
  const PeriodicSolution sol = solve_and_report(s, cfg, "");
  const Equilibrium eq = cfg.equilibrium();
  const double window = window_length(eq, cfg.domain.length, cfg.run.frozen);
  const Trajectory traj = run_ibvp(
      s, cfg, compatible_initial_data(sol.field, cfg.run.bump_amplitude), window, "ibvp");
  const auto d0 = distance_to_periodic(traj, sol.field);
  const auto d1 = c1_distance_to_periodic(traj, sol.field);
  double sup = 0.0;
  for (const auto& sn : traj.snapshots) sup = std::max(sup, sn.state.sup_norm());
  s.check("horizon_reached", traj.horizon_reached, "horizon = " + fmt(traj.horizon));
  s.results()["ibvp"] = {{"dt", traj.dt_used},
                         {"horizon", traj.horizon},
                         {"snapshots", traj.snapshots.size()},
                         {"sup_norm", sup},
                         {"final_distance_c0", d0.back()},
                         {"final_distance_c1", d1.back()}};
  s.artifact("distance.csv", s.csv(), [&](const std::string& p) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < d0.size(); ++i)
      rows.push_back({fmt(traj.snapshots[i].t), fmt(d0[i]), fmt(d1[i])});
    emit_table_csv({"t", "dist_c0", "dist_c1"}, rows, p);
  });
  s.artifact("trajectory.csv", s.fields(),
             [&](const std::string& p) { emit_trajectory_csv(traj, eq, p); });
}

void mode_stability(Session& s) { stability_pipeline(s, s.config(), ""); }

ExperimentConfig with_sweep_value(const ExperimentConfig& base, const std::string& param,
                                  double v) {
  ExperimentConfig c = base;
  if (param == "beta0") {
    if (c.damping.kind == "tabulated")
      throw ConfigError("run.sweep_parameter beta0 needs a constant or separable damping");
    c.damping.beta0 = v;
    c.damping.beta_star.reset();
    c.damping.deriv_bound.reset();
  } else if (param == "kappa") {
    c.forcing.kappa1 = v;
    c.forcing.kappa2 = v;
  } else if (param == "grid") {
    c.grid.nt = base.grid.nt * static_cast<int>(v);
    c.grid.nx = base.grid.nx * static_cast<int>(v);
  } else if (param == "epsilon") {
    const double eps = base.boundary_forcing().eps_measured;
    if (!(eps > 0.0)) throw ConfigError("run.sweep_parameter epsilon needs a nonzero forcing");
    const double f = v / eps;
    for (SignalSpec* sig : {&c.forcing.phi1b, &c.forcing.phi2b}) {
      sig->mean *= f;
      for (double& a : sig->cos) a *= f;
      for (double& b : sig->sin) b *= f;
      sig->amplitude *= f;
    }
  }
  validate_config(c);
  return c;
}

void mode_sweep(Session& s) {
  const ExperimentConfig& cfg = s.config();
  const std::string& param = cfg.run.sweep_parameter;
  std::vector<double> values = cfg.run.sweep_values;
  if (param == "beta0" || param == "epsilon" || param == "kappa")
    std::stable_sort(values.begin(), values.end(),
                     [](double a, double b) { return std::abs(a) < std::abs(b); });
  std::vector<std::vector<std::string>> rows;
  std::vector<StabilityRun> runs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const ExperimentConfig c = with_sweep_value(cfg, param, values[i]);
    const std::string tag = "_" + std::to_string(i);
    runs.push_back(stability_pipeline(s, c, tag));
    const auto& r = runs.back();
    rows.push_back({fmt(values[i]), fmt(r.periodic.report.final_c0_norm),
                    std::to_string(r.periodic.report.iterations_used), fmt(r.periodic.report.theta),
                    fmt(r.report.xi_c0), fmt(r.report.xi_c1)});
  }
  s.artifact("sweep.csv", s.csv(), [&](const std::string& p) {
    emit_table_csv({param, "c0_norm", "iterations", "theta", "xi_c0", "xi_c1"}, rows, p);
  });
  if (param == "beta0") {
    bool norms_ok = true;
    bool windows_ok = true;
    for (std::size_t i = 1; i < runs.size(); ++i) {
      if (runs[i].periodic.report.final_c0_norm > 1.02 * runs[i - 1].periodic.report.final_c0_norm)
        norms_ok = false;
      const auto& a = runs[i - 1].report.window_sup_c0;
      const auto& b = runs[i].report.window_sup_c0;
      for (std::size_t w = 0; w < std::min(a.size(), b.size()); ++w)
        if (b[w] > 1.02 * a[w]) windows_ok = false;
    }
    s.check("dissipativity_periodic_norm", norms_ok, "c0 norm non-increasing in |beta0|");
    s.check("dissipativity_window_sups", windows_ok, "window sups non-increasing in |beta0|");
  } else if (param == "epsilon") {
    bool ok = true;
    for (std::size_t i = 1; i < runs.size(); ++i) {
      if (values[i - 1] == 0.0) continue;
      const double expected = values[i] / values[i - 1];
      const double got = runs[i].periodic.report.final_c0_norm /
                         runs[i - 1].periodic.report.final_c0_norm;
      if (std::abs(got / expected - 1.0) > 0.1) ok = false;
    }
    s.check("linear_response", ok, "c0 norm proportional to epsilon within 10%");
  }
}

void mode_oracle(Session& s) {
  ExperimentConfig cfg = s.config();
  if (!cfg.damping_field().is_zero())
    throw ModeFailure{exit_config, "oracle mode requires beta == 0 (damping.beta0 = 0)"};
  cfg.run.frozen = true;
  const Equilibrium eq = cfg.equilibrium();
  const BoundaryForcing forcing = cfg.boundary_forcing();
  const bool transport = forcing.kappa1 == 0.0 && forcing.kappa2 == 0.0;
  const FrozenOracle oracle(forcing, cfg.damping_field(), eq, cfg.domain.length,
                            transport ? FrozenOracle::Mode::transport
                                      : FrozenOracle::Mode::reflection);
  std::vector<std::vector<std::string>> rows;
  std::vector<double> errors;
  for (int level = 0; level < 2; ++level) {
    ExperimentConfig c = cfg;
    c.grid.nt = cfg.grid.nt << level;
    c.grid.nx = cfg.grid.nx << level;
    const PeriodicSolution sol = solve_and_report(s, c, "_level" + std::to_string(level));
    const PeriodicField exact = oracle.sample(c.grid.nt, c.grid.nx);
    errors.push_back(sol.field.sup_diff(exact));
    rows.push_back({std::to_string(level), std::to_string(c.grid.nt), std::to_string(c.grid.nx),
                    fmt(errors.back()),
                    level == 0 ? "nan" : fmt(errors[level - 1] / errors[level])});
  }
  s.artifact("oracle.csv", s.csv(), [&](const std::string& p) {
    emit_table_csv({"level", "nt", "nx", "max_error", "reduction"}, rows, p);
  });
  const double reduction = errors[0] / errors[1];
  s.check("oracle_error_shrinks", errors[1] < errors[0],
          "errors " + fmt(errors[0]) + " -> " + fmt(errors[1]));
  s.check("oracle_reduction_at_least_3.5", reduction >= 3.5, "reduction = " + fmt(reduction));
  s.results()["oracle"] = {{"mode", transport ? "transport" : "reflection"},
                           {"series_terms", oracle.series_terms()},
                           {"max_error_coarse", errors[0]},
                           {"max_error_fine", errors[1]}};
}

} // namespace

RunResult run(const ExperimentConfig& config) {
  Session s(config);
  try {
    validate_config(config);
    switch (config.run.mode) {
    case RunMode::validate: mode_validate(s); break;
    case RunMode::periodic: mode_periodic(s); break;
    case RunMode::ibvp: mode_ibvp(s); break;
    case RunMode::stability: mode_stability(s); break;
    case RunMode::sweep: mode_sweep(s); break;
    case RunMode::oracle: mode_oracle(s); break;
    }
  } catch (const ModeFailure& f) {
    return s.finish(f.code, f.message);
  } catch (const ConfigError& e) {
    s.check("config", false, e.what());
    return s.finish(exit_config, e.what());
  }
  if (const CheckResult* failed = s.first_failure())
    return s.finish(exit_check_failure, "check failed: " + failed->name);
  return s.finish(exit_ok, "ok");
}

} // namespace pe
