#pragma once

#include <vector>

#include "pe/characteristics.hpp"
#include "pe/model.hpp"

namespace pe {

/// (phi1, phi2) sampled on the uniform x-grid x_k = k L / (nx - 1).
struct FieldPair {
  std::vector<double> phi1;
  std::vector<double> phi2;

  [[nodiscard]] int nx() const { return static_cast<int>(phi1.size()); }
  [[nodiscard]] double sup_norm() const;
};

struct InitialData {
  FieldPair phi0;
  double length = 1.0;
  /// Order to which the corner compatibility conditions hold (0 or 1).
  int compat_order = 0;
};

/// Polynomial bump psi(x) = sum_j coeffs[j] x^j on [0, L]. The default shape
/// is the quartic x^2 (L - x)^2, which vanishes to first order at both ends.
struct BumpShape {
  std::vector<double> coeffs;

  static BumpShape quartic(double length);
  [[nodiscard]] double value(double x) const;
  [[nodiscard]] double derivative(double x) const;
};

/// phi0 = phi_periodic(0, .) + (a1 psi, a2 psi) with psi normalised to
/// sup |psi| = 1 on [0, L]. Throws DomainError when psi or psi' does not
/// vanish at the corners (tolerance 1e-10 after normalisation).
InitialData compatible_initial_data(const PeriodicField& periodic, double amplitude1,
                                    double amplitude2, const BumpShape& shape);
InitialData compatible_initial_data(const PeriodicField& periodic, double amplitude);

struct StepOptions {
  double cfl_fraction = 0.8;
  /// Characteristic speeds frozen at the equilibrium (+-c_bar).
  bool frozen = false;
  int threads = 1;
};

/// One semi-Lagrangian step from t to t + dt: Heun-type foot tracing
/// (predictor with the departure speed, corrector with the averaged speed),
/// cubic interpolation at the feet, trapezoidal source integration and
/// boundary values assigned from the reflection conditions after the outflow
/// values. Throws CflError when dt max|lambda| / dx > cfl_fraction and
/// AdmissibilityError when the new state leaves the neighborhood.
FieldPair step(const FieldPair& state, double t, double length, const BoundaryForcing& forcing,
               const DampingField& damping, const Equilibrium& eq, double dt,
               const StepOptions& opts = {});

struct Snapshot {
  double t = 0.0;
  FieldPair state;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  double dt_used = 0.0;
  double horizon = 0.0;
  double length = 1.0;
  bool horizon_reached = false;

  [[nodiscard]] double snapshot_spacing() const;
};

struct IbvpOptions {
  double horizon = 1.0;
  double snapshot_every = 0.1;
  double cfl_fraction = 0.8;
  bool frozen = false;
  int threads = 1;
};

/// Fixed dt = snapshot_every / ceil(snapshot_every / dt_max) where dt_max is
/// cfl_fraction dx over the largest speed in the neighborhood ball, so every
/// snapshot falls on a step. The CFL bound is re-checked at every step.
Trajectory solve_ibvp(const InitialData& init, const BoundaryForcing& forcing,
                      const DampingField& damping, const Equilibrium& eq,
                      const IbvpOptions& opts);

} // namespace pe
