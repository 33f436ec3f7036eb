#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pe/model.hpp"
#include "pe/periodic.hpp"

namespace pe {

enum class RunMode { validate, periodic, ibvp, stability, sweep, oracle };

const char* to_string(RunMode mode);
std::optional<RunMode> parse_mode(const std::string& name);

/// Forcing signal description. type "fourier": mean + cos/sin coefficient lists;
/// type "power_sine": amplitude |sin(w t + phase)|^exponent.
struct SignalSpec {
  std::string type = "fourier";
  double mean = 0.0;
  std::vector<double> cos;
  std::vector<double> sin;
  double amplitude = 0.0;
  double exponent = 2.0;
  double phase = 0.0;

  [[nodiscard]] PeriodicSignal build(double period) const;
};

struct DampingSpec {
  std::string kind = "constant";
  double beta0 = 0.0;
  /// separable: temporal factor (Fourier) and spatial polynomial.
  SignalSpec temporal;
  std::vector<double> spatial{1.0};
  /// tabulated: values[j * nx + k].
  int table_nt = 0;
  int table_nx = 0;
  std::vector<double> values;
  std::optional<double> beta_star;
  std::optional<double> deriv_bound;

  [[nodiscard]] DampingField build(double period, double length) const;
};

struct ExperimentConfig {
  struct Gas {
    double gamma = 1.4;
    double rho_bar = 1.0;
    /// <= 0 selects 0.1 c_bar.
    double neighborhood_radius = 0.0;
  } gas;
  struct Domain {
    double length = 1.0;
    double period = 1.0;
  } domain;
  DampingSpec damping;
  struct Forcing {
    SignalSpec phi1b;
    SignalSpec phi2b;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
  } forcing;
  struct Grid {
    int nt = 128;
    int nx = 128;
    int substeps = 4;
    int interpolation_order = 3;
  } grid;
  struct Run {
    RunMode mode = RunMode::validate;
    double tol = 0.0;
    int max_iter = 60;
    std::string method = "column_march";
    bool frozen = false;
    double horizon_periods = 3.0;
    double bump_amplitude = 0.005;
    int snapshots_per_window = 16;
    double cfl_fraction = 0.8;
    std::string sweep_parameter = "beta0";
    std::vector<double> sweep_values;
  } run;
  struct Output {
    std::string directory = "out";
    bool emit_fields = true;
    bool emit_csv = true;
  } output;
  int threads = 1;

  [[nodiscard]] Equilibrium equilibrium() const;
  [[nodiscard]] BoundaryForcing boundary_forcing() const;
  [[nodiscard]] DampingField damping_field() const;
  [[nodiscard]] IterationConfig iteration() const;
};

/// Parses and validates a JSON config. Unknown keys, missing physics keys
/// (gamma, rho_bar, the damping kind and amplitude, kappa1, kappa2, period,
/// length) and values outside their invariants raise ConfigError naming the
/// key and, for syntax errors, the line.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Re-checks every invariant of a config (also run by the parsers).
void validate_config(const ExperimentConfig& config);

/// Fully populated JSON echo of a config; parsing it reproduces the config.
nlohmann::json config_to_json(const ExperimentConfig& config);

} // namespace pe
