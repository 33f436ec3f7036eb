#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pe/characteristics.hpp"
#include "pe/model.hpp"

namespace pe {

enum class SweepMethod {
  /// Semi-Lagrangian march column by column from the inflow face; one cell
  /// of characteristic per node and step. O(nt * nx) per sweep.
  column_march,
  /// Trace every node's characteristic all the way to the boundary face and
  /// integrate along the whole path. O(nt * nx^2) per sweep; reference path.
  full_path,
};

struct IterationConfig {
  int nt = 128;
  int nx = 128;
  /// Sup-norm stopping threshold; <= 0 selects 1e-10 * max(eps, 1e-6).
  double tol = 0.0;
  int max_iter = 60;
  int substeps_per_cell = 4;
  int interpolation_order = 3;
  /// Freeze characteristic speeds at the equilibrium (linear transport).
  bool frozen_coefficients = false;
  SweepMethod method = SweepMethod::column_march;
  int threads = 1;
  /// Cap on predictor-corrector passes for the implicit weight term.
  int max_corrector_passes = 8;
};

/// Effective stopping threshold for a config and forcing.
double effective_tol(const IterationConfig& config, const BoundaryForcing& forcing);

struct ConvergenceReport {
  std::vector<double> diffs;
  /// (l, diffs[l-1] / diffs[l-2]) for 1-based iteration l >= 2, kept only
  /// where diffs[l-2] > 10 tol.
  std::vector<std::pair<int, double>> theta_estimates;
  /// Geometric mean of the last three ratios (0 when none are valid).
  double theta = 0.0;
  double final_c0_norm = 0.0;
  double final_c1_norm = 0.0;
  int iterations_used = 0;
  bool converged = false;
  double tol = 0.0;
};

/// Thrown when the fixed-point iteration fails; carries the partial report
/// and the last iterate.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, ConvergenceReport report, PeriodicField last)
      : std::runtime_error(what), report_(std::move(report)), last_(std::move(last)) {}
  [[nodiscard]] const ConvergenceReport& report() const { return report_; }
  [[nodiscard]] const PeriodicField& last_iterate() const { return last_; }

private:
  ConvergenceReport report_;
  PeriodicField last_;
};

class NonContractionError : public SolverError {
public:
  using SolverError::SolverError;
};

class MaxIterError : public SolverError {
public:
  using SolverError::SolverError;
};

/// The predictor-corrector for the implicit weight term did not settle.
class CorrectorError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// phi^(0) = 0 on the config's grid.
PeriodicField init_zero(const IterationConfig& config, double period, double length);

/// New phi1 (family 1) or phi2 (family 2) on the grid, row-major j * nx + k,
/// from the previous iterate.
std::vector<double> sweep_family1(const PeriodicField& prev, const BoundaryForcing& forcing,
                                  const DampingField& damping, const Equilibrium& eq,
                                  const IterationConfig& config);
std::vector<double> sweep_family2(const PeriodicField& prev, const BoundaryForcing& forcing,
                                  const DampingField& damping, const Equilibrium& eq,
                                  const IterationConfig& config);

struct IterateResult {
  PeriodicField next;
  double sup_diff = 0.0;
};

IterateResult iterate_once(const PeriodicField& prev, const BoundaryForcing& forcing,
                           const DampingField& damping, const Equilibrium& eq,
                           const IterationConfig& config);

struct PeriodicSolution {
  PeriodicField field;
  ConvergenceReport report;
};

/// Iterates from zero until the sup-diff drops below tol. Throws
/// NonContractionError after three consecutive increases and MaxIterError
/// when max_iter is exhausted.
PeriodicSolution solve_periodic(const BoundaryForcing& forcing, const DampingField& damping,
                                const Equilibrium& eq, const IterationConfig& config);

/// Sup of |phi|, d_t phi, d_x phi over both components (centered
/// differences, periodic in t, second-order one-sided at the x faces).
double c1_norm(const PeriodicField& field);

struct PdeResidual {
  double residual1 = 0.0;
  double residual2 = 0.0;
  double boundary_mismatch = 0.0;
  [[nodiscard]] double residual() const { return std::max(residual1, residual2); }
};

/// Residual of d_t phi_i + lambda_i(phi + Phi) d_x phi_i - beta/2 (phi1 + phi2)
/// and the sup mismatch of the two reflection conditions at boundary nodes.
PdeResidual pde_residual(const PeriodicField& solution, const BoundaryForcing& forcing,
                         const DampingField& damping, const Equilibrium& eq, bool frozen = false);

} // namespace pe
