#include "pe/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pe/errors.hpp"

namespace pe {

using nlohmann::json;

const char* to_string(RunMode mode) {
  switch (mode) {
  case RunMode::validate: return "validate";
  case RunMode::periodic: return "periodic";
  case RunMode::ibvp: return "ibvp";
  case RunMode::stability: return "stability";
  case RunMode::sweep: return "sweep";
  case RunMode::oracle: return "oracle";
  }
  return "validate";
}

std::optional<RunMode> parse_mode(const std::string& name) {
  for (RunMode m : {RunMode::validate, RunMode::periodic, RunMode::ibvp, RunMode::stability,
                    RunMode::sweep, RunMode::oracle})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

PeriodicSignal SignalSpec::build(double period) const {
  if (type == "fourier") return PeriodicSignal::fourier(period, mean, cos, sin);
  if (type == "power_sine") return PeriodicSignal::power_sine(period, amplitude, exponent, phase);
  throw ConfigError("unknown signal type '" + type + "'");
}

DampingField DampingSpec::build(double period, double length) const {
  DampingField f;
  if (kind == "constant")
    f = DampingField::constant(beta0, period, length);
  else if (kind == "separable_periodic")
    f = DampingField::separable(beta0, temporal.build(period), spatial, length);
  else if (kind == "tabulated")
    f = DampingField::tabulated(values, table_nt, table_nx, period, length);
  else
    throw ConfigError("unknown damping kind '" + kind + "'");
  if (beta_star || deriv_bound)
    f = f.with_bounds(beta_star.value_or(f.beta_star()), deriv_bound.value_or(f.deriv_bound()));
  return f;
}

Equilibrium ExperimentConfig::equilibrium() const {
  const double r = gas.neighborhood_radius > 0.0
                       ? gas.neighborhood_radius
                       : default_neighborhood_radius(gas.rho_bar, gas.gamma);
  return make_equilibrium(gas.rho_bar, gas.gamma, r);
}

BoundaryForcing ExperimentConfig::boundary_forcing() const {
  return make_forcing(forcing.phi1b.build(domain.period), forcing.phi2b.build(domain.period),
                      forcing.kappa1, forcing.kappa2);
}

DampingField ExperimentConfig::damping_field() const {
  return damping.build(domain.period, domain.length);
}

IterationConfig ExperimentConfig::iteration() const {
  IterationConfig c;
  c.nt = grid.nt;
  c.nx = grid.nx;
  c.tol = run.tol;
  c.max_iter = run.max_iter;
  c.substeps_per_cell = grid.substeps;
  c.interpolation_order = grid.interpolation_order;
  c.frozen_coefficients = run.frozen;
  c.method = run.method == "full_path" ? SweepMethod::full_path : SweepMethod::column_march;
  c.threads = threads;
  return c;
}

namespace {

// Strict reader over one JSON object: every key must be consumed.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  ~Section() = default;

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T required(const std::string& key) {
    if (!j_.contains(key))
      throw ConfigError(name(key) + ": required key is missing (no default for physics parameters)");
    return get<T>(key);
  }

  template <class T>
  T optional(const std::string& key, T fallback) {
    if (!j_.contains(key)) return fallback;
    return get<T>(key);
  }

  Section section(const std::string& key, bool required_section) {
    static const json empty = json::object();
    if (!j_.contains(key)) {
      if (required_section) throw ConfigError(name(key) + ": required section is missing");
      used_.insert(key);
      return Section(empty, name(key));
    }
    used_.insert(key);
    return Section(j_.at(key), name(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(name(it.key()) + ": unknown key");
  }

  [[nodiscard]] std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

private:
  template <class T>
  T get(const std::string& key) {
    used_.insert(key);
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name(key) + ": wrong type (" + e.what() + ")");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

SignalSpec read_signal(Section s) {
  SignalSpec sig;
  sig.type = s.optional<std::string>("type", "fourier");
  if (sig.type == "fourier") {
    sig.mean = s.optional<double>("mean", 0.0);
    sig.cos = s.optional<std::vector<double>>("cos", {});
    sig.sin = s.optional<std::vector<double>>("sin", {});
  } else if (sig.type == "power_sine") {
    sig.amplitude = s.required<double>("amplitude");
    sig.exponent = s.required<double>("exponent");
    sig.phase = s.optional<double>("phase", 0.0);
  } else {
    throw ConfigError(s.name("type") + ": expected 'fourier' or 'power_sine', got '" + sig.type +
                      "'");
  }
  s.finish();
  return sig;
}

json signal_to_json(const SignalSpec& s) {
  if (s.type == "power_sine")
    return {{"type", s.type}, {"amplitude", s.amplitude}, {"exponent", s.exponent},
            {"phase", s.phase}};
  return {{"type", s.type}, {"mean", s.mean}, {"cos", s.cos}, {"sin", s.sin}};
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void validate_signal(const SignalSpec& s, const std::string& key) {
  auto finite_all = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  if (s.type == "fourier") {
    require(std::isfinite(s.mean) && finite_all(s.cos) && finite_all(s.sin),
            key + ": coefficients must be finite");
  } else {
    require(std::isfinite(s.amplitude) && std::isfinite(s.phase),
            key + ": amplitude and phase must be finite");
    require(s.exponent > 1.0, key + ".exponent must exceed 1 (C^1 forcing required)");
  }
}

} // namespace

void validate_config(const ExperimentConfig& c) {
  require(c.gas.gamma > 1.0, "gas.gamma = " + num(c.gas.gamma) + " violates gamma > 1");
  require(c.gas.rho_bar > 0.0, "gas.rho_bar = " + num(c.gas.rho_bar) + " violates rho_bar > 0");
  require(std::isfinite(c.gas.neighborhood_radius) && c.gas.neighborhood_radius >= 0.0,
          "gas.neighborhood_radius must be >= 0 (0 selects 0.1 c_bar)");
  require(c.domain.length > 0.0, "domain.length = " + num(c.domain.length) + " violates L > 0");
  require(c.domain.period > 0.0,
          "domain.period = " + num(c.domain.period) + " violates T_star > 0");
  require(std::abs(c.forcing.kappa1) < 1.0,
          "forcing.kappa1 = " + num(c.forcing.kappa1) +
              " violates |kappa1| < 1 (dissipative boundary condition)");
  require(std::abs(c.forcing.kappa2) < 1.0,
          "forcing.kappa2 = " + num(c.forcing.kappa2) +
              " violates |kappa2| < 1 (dissipative boundary condition)");
  validate_signal(c.forcing.phi1b, "forcing.phi1b");
  validate_signal(c.forcing.phi2b, "forcing.phi2b");
  require(c.grid.nt >= 8 && c.grid.nx >= 8, "grid: nt and nx must be >= 8");
  require(c.grid.substeps >= 1, "grid.substeps must be >= 1");
  require(c.grid.interpolation_order == 1 || c.grid.interpolation_order == 3,
          "grid.interpolation_order must be 1 or 3");
  require(c.run.tol >= 0.0, "run.tol must be >= 0 (0 selects the default)");
  require(c.run.max_iter >= 1, "run.max_iter must be >= 1");
  require(c.run.method == "column_march" || c.run.method == "full_path",
          "run.method must be 'column_march' or 'full_path'");
  require(c.run.horizon_periods > 0.0, "run.horizon_periods must be positive");
  require(c.run.bump_amplitude >= 0.0, "run.bump_amplitude must be >= 0");
  require(c.run.snapshots_per_window >= 2, "run.snapshots_per_window must be >= 2");
  require(c.run.cfl_fraction > 0.0 && c.run.cfl_fraction <= 1.0,
          "run.cfl_fraction must lie in (0, 1]");
  static const std::set<std::string> sweepable{"epsilon", "beta0", "kappa", "grid"};
  require(sweepable.count(c.run.sweep_parameter) == 1,
          "run.sweep_parameter must be one of epsilon, beta0, kappa, grid");
  if (c.run.mode == RunMode::sweep)
    require(!c.run.sweep_values.empty(), "run.sweep_values must be non-empty in sweep mode");
  if (c.run.sweep_parameter == "beta0")
    for (double v : c.run.sweep_values)
      require(v <= 0.0, "run.sweep_values: beta0 = " + num(v) +
                            " violates beta <= 0 (damping must be non-positive)");
  if (c.run.sweep_parameter == "kappa")
    for (double v : c.run.sweep_values)
      require(std::abs(v) < 1.0, "run.sweep_values: kappa = " + num(v) + " violates |kappa| < 1");
  if (c.run.sweep_parameter == "grid")
    for (double v : c.run.sweep_values)
      require(v >= 1.0 && v == std::floor(v), "run.sweep_values: grid scales must be integers >= 1");
  require(c.threads >= 1, "threads must be >= 1");

  const DampingSpec& d = c.damping;
  require(d.kind == "constant" || d.kind == "separable_periodic" || d.kind == "tabulated",
          "damping.kind must be constant, separable_periodic or tabulated");
  if (d.kind != "tabulated")
    require(d.beta0 <= 0.0, "damping.beta0 = " + num(d.beta0) +
                                " violates beta <= 0 (damping must be non-positive)");
  if (d.kind == "separable_periodic") validate_signal(d.temporal, "damping.temporal");
  if (d.kind == "tabulated")
    require(d.table_nt >= 4 && d.table_nx >= 4 &&
                d.values.size() == static_cast<std::size_t>(d.table_nt) * d.table_nx,
            "damping: tabulated values need nt, nx >= 4 and nt * nx entries");
  if (d.beta_star) require(*d.beta_star <= 0.0, "damping.beta_star must be <= 0");
  if (d.deriv_bound) require(*d.deriv_bound >= 0.0, "damping.deriv_bound must be >= 0");

  DampingField field;
  try {
    field = c.damping_field();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("damping: ") + e.what());
  }
  const HypothesisReport h = validate_hypothesis(field, std::max(c.grid.nt, 16),
                                                 std::max(c.grid.nx, 16));
  if (!h.passed) {
    std::string msg = "damping violates the hypothesis on beta:";
    for (const auto& v : h.violations) msg += " " + v + ";";
    throw ConfigError(msg);
  }
  try {
    (void)c.equilibrium();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("gas: ") + e.what());
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  Section root(j, "");
  {
    Section s = root.section("gas", true);
    c.gas.gamma = s.required<double>("gamma");
    c.gas.rho_bar = s.required<double>("rho_bar");
    c.gas.neighborhood_radius = s.optional<double>("neighborhood_radius", 0.0);
    s.finish();
  }
  {
    Section s = root.section("domain", true);
    c.domain.length = s.required<double>("length");
    c.domain.period = s.required<double>("period");
    s.finish();
  }
  {
    Section s = root.section("damping", true);
    c.damping.kind = s.required<std::string>("kind");
    if (c.damping.kind == "tabulated") {
      c.damping.table_nt = s.required<int>("nt");
      c.damping.table_nx = s.required<int>("nx");
      c.damping.values = s.required<std::vector<double>>("values");
    } else {
      c.damping.beta0 = s.required<double>("beta0");
    }
    if (c.damping.kind == "separable_periodic") {
      c.damping.temporal = read_signal(s.section("temporal", true));
      c.damping.spatial = s.optional<std::vector<double>>("spatial", {1.0});
    }
    if (s.has("beta_star")) c.damping.beta_star = s.required<double>("beta_star");
    if (s.has("deriv_bound")) c.damping.deriv_bound = s.required<double>("deriv_bound");
    s.finish();
  }
  {
    Section s = root.section("forcing", true);
    c.forcing.kappa1 = s.required<double>("kappa1");
    c.forcing.kappa2 = s.required<double>("kappa2");
    c.forcing.phi1b = read_signal(s.section("phi1b", false));
    c.forcing.phi2b = read_signal(s.section("phi2b", false));
    s.finish();
  }
  {
    Section s = root.section("grid", false);
    c.grid.nt = s.optional<int>("nt", c.grid.nt);
    c.grid.nx = s.optional<int>("nx", c.grid.nx);
    c.grid.substeps = s.optional<int>("substeps", c.grid.substeps);
    c.grid.interpolation_order = s.optional<int>("interpolation_order", c.grid.interpolation_order);
    s.finish();
  }
  {
    Section s = root.section("run", false);
    const std::string mode = s.optional<std::string>("mode", "validate");
    const auto m = parse_mode(mode);
    if (!m) throw ConfigError("run.mode: unknown mode '" + mode + "'");
    c.run.mode = *m;
    c.run.tol = s.optional<double>("tol", c.run.tol);
    c.run.max_iter = s.optional<int>("max_iter", c.run.max_iter);
    c.run.method = s.optional<std::string>("method", c.run.method);
    c.run.frozen = s.optional<bool>("frozen", c.run.frozen);
    c.run.horizon_periods = s.optional<double>("horizon_periods", c.run.horizon_periods);
    c.run.bump_amplitude = s.optional<double>("bump_amplitude", c.run.bump_amplitude);
    c.run.snapshots_per_window = s.optional<int>("snapshots_per_window", c.run.snapshots_per_window);
    c.run.cfl_fraction = s.optional<double>("cfl_fraction", c.run.cfl_fraction);
    c.run.sweep_parameter = s.optional<std::string>("sweep_parameter", c.run.sweep_parameter);
    c.run.sweep_values = s.optional<std::vector<double>>("sweep_values", {});
    s.finish();
  }
  {
    Section s = root.section("output", false);
    c.output.directory = s.optional<std::string>("directory", c.output.directory);
    c.output.emit_fields = s.optional<bool>("emit_fields", c.output.emit_fields);
    c.output.emit_csv = s.optional<bool>("emit_csv", c.output.emit_csv);
    s.finish();
  }
  c.threads = root.optional<int>("threads", 1);
  root.finish();
  validate_config(c);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError("config parse error at line " + std::to_string(line) + ": " + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  json damping = {{"kind", c.damping.kind}};
  if (c.damping.kind == "tabulated") {
    damping["nt"] = c.damping.table_nt;
    damping["nx"] = c.damping.table_nx;
    damping["values"] = c.damping.values;
  } else {
    damping["beta0"] = c.damping.beta0;
  }
  if (c.damping.kind == "separable_periodic") {
    damping["temporal"] = signal_to_json(c.damping.temporal);
    damping["spatial"] = c.damping.spatial;
  }
  if (c.damping.beta_star) damping["beta_star"] = *c.damping.beta_star;
  if (c.damping.deriv_bound) damping["deriv_bound"] = *c.damping.deriv_bound;
  return {
      {"gas",
       {{"gamma", c.gas.gamma},
        {"rho_bar", c.gas.rho_bar},
        {"neighborhood_radius", c.gas.neighborhood_radius}}},
      {"domain", {{"length", c.domain.length}, {"period", c.domain.period}}},
      {"damping", damping},
      {"forcing",
       {{"kappa1", c.forcing.kappa1},
        {"kappa2", c.forcing.kappa2},
        {"phi1b", signal_to_json(c.forcing.phi1b)},
        {"phi2b", signal_to_json(c.forcing.phi2b)}}},
      {"grid",
       {{"nt", c.grid.nt},
        {"nx", c.grid.nx},
        {"substeps", c.grid.substeps},
        {"interpolation_order", c.grid.interpolation_order}}},
      {"run",
       {{"mode", to_string(c.run.mode)},
        {"tol", c.run.tol},
        {"max_iter", c.run.max_iter},
        {"method", c.run.method},
        {"frozen", c.run.frozen},
        {"horizon_periods", c.run.horizon_periods},
        {"bump_amplitude", c.run.bump_amplitude},
        {"snapshots_per_window", c.run.snapshots_per_window},
        {"cfl_fraction", c.run.cfl_fraction},
        {"sweep_parameter", c.run.sweep_parameter},
        {"sweep_values", c.run.sweep_values}}},
      {"output",
       {{"directory", c.output.directory},
        {"emit_fields", c.output.emit_fields},
        {"emit_csv", c.output.emit_csv}}},
      {"threads", c.threads},
  };
}

} // namespace pe
