#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pe/characteristics.hpp"
#include "pe/ibvp.hpp"
#include "pe/model.hpp"

namespace pe {

/// Stability window T0 = L max |nu_i|: L A0 over the neighborhood ball, or
/// L / c_bar when the speeds are frozen at the equilibrium.
double window_length(const Equilibrium& eq, double length, bool frozen = false);

/// Per-snapshot sup over x and both components of |traj - periodic|, with the
/// periodic field interpolated (cubic, periodic) in t. The x-grids must match.
std::vector<double> distance_to_periodic(const Trajectory& traj, const PeriodicField& periodic);
/// Per-snapshot sup distance between two trajectories on the same snapshots.
std::vector<double> distance_between(const Trajectory& a, const Trajectory& b);

/// Per-snapshot max over {d_t, d_x}, both components and x of the difference
/// of first differences. d_t uses neighbouring snapshots (centered inside,
/// one-sided second order at the ends); d_x is centered, one-sided at faces.
std::vector<double> c1_distance_to_periodic(const Trajectory& traj, const PeriodicField& periodic);
std::vector<double> c1_distance_between(const Trajectory& a, const Trajectory& b);

struct StabilityReport {
  double window_length = 0.0;
  std::vector<double> window_sup_c0;
  std::vector<double> window_sup_c1;
  /// Successive window ratios sup[w] / sup[w-1]; NaN where not fitted.
  std::vector<double> ratio_c0;
  std::vector<double> ratio_c1;
  /// Geometric mean of the fitted successive ratios (NaN when none).
  double xi_c0 = 0.0;
  double xi_c1 = 0.0;
  /// Geometric mean of sup[w] / sup[w-2] over fitted pairs.
  double xi2_c0 = 0.0;
  double xi2_c1 = 0.0;
  /// First window from which the sups decrease strictly; empty if never.
  std::optional<int> monotone_after_c0;
  std::optional<int> monotone_after_c1;
  double error_floor = 0.0;
};

/// Groups samples (times[s], values[s]) into full windows [w T0, (w + 1) T0)
/// and fits geometric decay. Ratios are fitted only where both window sups
/// exceed 10 error_floor. Throws InsufficientDataError below 4 full windows.
StabilityReport fit_stability(const std::vector<double>& times, const std::vector<double>& c0,
                              const std::vector<double>& c1, double window,
                              double error_floor = 0.0);

struct RegularityReport {
  /// Stencil names: "d2t", "dtdx", "d2x".
  std::vector<std::string> stencils;
  std::vector<double> sup_coarse;
  std::vector<double> sup_fine;
  std::vector<double> refinement_ratios;

  [[nodiscard]] double max_ratio() const;
};

struct SecondDifferences {
  double d2t = 0.0;
  double dtdx = 0.0;
  double d2x = 0.0;
};

/// Sup over both components of the 3-point second differences in t
/// (periodic) and x (interior) and the 4-point cross difference.
SecondDifferences second_differences(const PeriodicField& field);

/// Second-difference sups on a field and its refinement, with ratios
/// fine / coarse (0 / 0 counts as ratio 1).
RegularityReport regularity_probe(const PeriodicField& coarse, const PeriodicField& fine);

/// Closed-form solutions of the frozen linear problem (beta = 0, speeds
/// +-c_bar). Transport needs kappa1 = kappa2 = 0; reflection sums the bounce
/// series B1(s) = sum_k (kappa1 kappa2)^k [phi1b(s - 2k tau) +
/// kappa1 phi2b(s - tau - 2k tau)], tau = L / c_bar, truncated below 1e-14.
class FrozenOracle {
public:
  enum class Mode { transport, reflection };

  FrozenOracle(BoundaryForcing forcing, const DampingField& damping, const Equilibrium& eq,
               double length, Mode mode);

  [[nodiscard]] double phi1(double t, double x) const;
  [[nodiscard]] double phi2(double t, double x) const;
  /// Samples both components on a periodic grid.
  [[nodiscard]] PeriodicField sample(int nt, int nx) const;
  /// Terms used by the reflection series (1 in transport mode).
  [[nodiscard]] int series_terms() const { return terms_; }

private:
  [[nodiscard]] double boundary_trace1(double s) const;
  [[nodiscard]] double boundary_trace2(double s) const;

  BoundaryForcing forcing_;
  double c_bar_;
  double length_;
  double tau_;
  Mode mode_;
  int terms_ = 1;
};

struct EulerResidual {
  double mass = 0.0;
  double momentum = 0.0;
  [[nodiscard]] double residual() const { return mass > momentum ? mass : momentum; }
};

/// Converts phi + Phi to (rho, u) and evaluates the conservative residuals
///   d_t rho + d_x (rho u)   and   d_t (rho u) + d_x (rho u^2 + p) - beta rho u
/// with p = rho^gamma, by centered differences (periodic in t, second-order
/// one-sided at the x faces).
EulerResidual euler_residual(const PeriodicField& field, const Equilibrium& eq,
                             const DampingField& damping);
/// Same on a trajectory, using interior snapshots only for d_t.
EulerResidual euler_residual(const Trajectory& traj, const Equilibrium& eq,
                             const DampingField& damping);

} // namespace pe
