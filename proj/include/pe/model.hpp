#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pe/signal.hpp"

namespace pe {

/// Physical state of the gamma-law gas (pressure p = rho^gamma is derived).
struct GasState {
  double rho = 1.0;
  double u = 0.0;
};

/// Riemann invariants m = (u - 2c/(gamma-1))/2, n = (u + 2c/(gamma-1))/2.
struct RiemannPair {
  double m = 0.0;
  double n = 0.0;
};

/// A pair of characteristic quantities ordered by family (1 = left-going,
/// 2 = right-going): eigenvalues or their reciprocals.
struct FamilyPair {
  double first = 0.0;
  double second = 0.0;
};

double sound_speed(double rho, double gamma);
RiemannPair riemann_from_state(GasState state, double gamma);
GasState state_from_riemann(RiemannPair pair, double gamma);
FamilyPair eigenvalues(RiemannPair pair, double gamma);

/// Reciprocal characteristic speeds (1/lambda_1, 1/lambda_2). Throws
/// AdmissibilityError unless lambda_1 <= -margin and lambda_2 >= margin.
FamilyPair nu(RiemannPair pair, double gamma, double margin = 0.0);

/// Background state Phi = (m_bar, n_bar) and the sup-norm ball of radius
/// `neighborhood_radius` (in perturbation coordinates) on which the flow is
/// guaranteed subsonic.
struct Equilibrium {
  double rho_bar = 1.0;
  double gamma = 1.4;
  double m_bar = 0.0;
  double n_bar = 0.0;
  double c_bar = 0.0;
  double A0 = 0.0;
  double neighborhood_radius = 0.0;

  [[nodiscard]] RiemannPair shifted(double phi1, double phi2) const {
    return {m_bar + phi1, n_bar + phi2};
  }
  /// Eigenvalues of the perturbed state phi + Phi.
  [[nodiscard]] FamilyPair speeds(double phi1, double phi2) const;
  /// nu_i(phi + Phi); throws AdmissibilityError outside the ball or near sonic.
  [[nodiscard]] FamilyPair inverse_speeds(double phi1, double phi2) const;
  /// nu_i(Phi) = (-1/c_bar, 1/c_bar).
  [[nodiscard]] FamilyPair frozen_inverse_speeds() const { return {-1.0 / c_bar, 1.0 / c_bar}; }
  [[nodiscard]] bool in_neighborhood(double phi1, double phi2) const;
  /// Guard below which |lambda_i| counts as sonic.
  [[nodiscard]] double sonic_margin() const { return 1e-6 * c_bar; }
  /// Largest |lambda_i| over the closed neighborhood ball.
  [[nodiscard]] double max_speed() const;
};

/// Builds the equilibrium for background density rho_bar. A0 is the maximum
/// of 1/|lambda_i| over the extreme points of the radius ball; a radius for
/// which some point of the ball is sonic or supersonic is rejected.
Equilibrium make_equilibrium(double rho_bar, double gamma, double radius);

/// Default neighborhood radius, 0.1 * c_bar.
double default_neighborhood_radius(double rho_bar, double gamma);

/// Damping coefficient beta(t, x) on [0, period) x [0, length].
class DampingField {
public:
  enum class Kind { constant, separable_periodic, tabulated };

  DampingField() = default;

  static DampingField constant(double beta0, double period, double length);
  /// beta0 * temporal(t) * sum_j spatial[j] x^j
  static DampingField separable(double beta0, PeriodicSignal temporal,
                                std::vector<double> spatial_poly, double length);
  /// values[j * nx + k] at t_j = j period / nt, x_k = k length / (nx - 1);
  /// periodic cubic interpolation in t, clamped cubic in x.
  static DampingField tabulated(std::vector<double> values, int nt, int nx, double period,
                                double length);

  [[nodiscard]] double value(double t, double x) const;
  [[nodiscard]] double dt(double t, double x) const;
  [[nodiscard]] double dx(double t, double x) const;
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] bool is_time_independent() const;

  /// Returns a copy with explicitly supplied bounds (e.g. from a config).
  [[nodiscard]] DampingField with_bounds(double beta_star, double deriv_bound) const;
  /// Returns a copy mirrored in space, x -> length - x.
  [[nodiscard]] DampingField mirrored() const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double beta0() const { return beta0_; }
  [[nodiscard]] double period() const { return period_; }
  [[nodiscard]] double length() const { return length_; }
  [[nodiscard]] double beta_star() const { return beta_star_; }
  [[nodiscard]] double deriv_bound() const { return deriv_bound_; }
  [[nodiscard]] const PeriodicSignal& temporal() const { return temporal_; }
  [[nodiscard]] const std::vector<double>& spatial() const { return spatial_; }
  [[nodiscard]] const std::vector<double>& table() const { return table_; }
  [[nodiscard]] int table_nt() const { return table_nt_; }
  [[nodiscard]] int table_nx() const { return table_nx_; }

private:
  [[nodiscard]] double spatial_value(double x) const;
  [[nodiscard]] double spatial_derivative(double x) const;
  [[nodiscard]] double table_eval(double t, double x, int dt_order, int dx_order) const;

  Kind kind_ = Kind::constant;
  double beta0_ = 0.0;
  double period_ = 1.0;
  double length_ = 1.0;
  double beta_star_ = 0.0;
  double deriv_bound_ = 0.0;
  PeriodicSignal temporal_;
  std::vector<double> spatial_;
  std::vector<double> table_;
  int table_nt_ = 0;
  int table_nx_ = 0;
  bool mirrored_ = false;
};

struct HypothesisReport {
  bool passed = true;
  double max_beta = 0.0;
  double min_beta = 0.0;
  double max_abs_dt = 0.0;
  double max_abs_dx = 0.0;
  double periodicity_defect = 0.0;
  std::vector<std::string> violations;
};

/// Samples the damping field on an nt x nx grid and checks sign, lower bound,
/// derivative bound and periodicity. Violations are reported, not thrown.
HypothesisReport validate_hypothesis(const DampingField& field, int nt, int nx);

/// Time-periodic boundary data for the two reflection conditions
///   phi2(t, 0) = phi2b(t) + kappa2 phi1(t, 0)
///   phi1(t, L) = phi1b(t) + kappa1 phi2(t, L)
struct BoundaryForcing {
  PeriodicSignal phi1b;
  PeriodicSignal phi2b;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double period = 1.0;
  double eps_measured = 0.0;

  [[nodiscard]] bool is_zero() const { return phi1b.is_zero() && phi2b.is_zero(); }
};

/// Builds a forcing and fills eps_measured. Rejects |kappa_i| >= 1.
BoundaryForcing make_forcing(PeriodicSignal phi1b, PeriodicSignal phi2b, double kappa1,
                             double kappa2);

struct C1Norm {
  double sampled = 0.0;
  double certified = 0.0;
};

/// max over both forcings of max(sup|f|, sup|f'|): dense sampling over one
/// period, plus the coefficient bound.
C1Norm boundary_c1_norm(const BoundaryForcing& forcing, int samples);

} // namespace pe
