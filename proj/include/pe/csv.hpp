#pragma once

#include <string>
#include <vector>

#include "pe/analysis.hpp"
#include "pe/characteristics.hpp"
#include "pe/ibvp.hpp"
#include "pe/model.hpp"
#include "pe/periodic.hpp"

namespace pe {

/// Fixed-format number: 17 significant digits ("%.17g"), "nan" for NaN.
std::string format_number(double v);

/// Field CSV: header `t,x,phi1,phi2,m,n,rho,u`, t-outer row order, LF line
/// endings, no trailing delimiter. m, n, rho, u are the physical values of
/// phi + Phi.
void emit_field_csv(const PeriodicField& field, const Equilibrium& eq, const std::string& path);
void emit_snapshot_csv(const Snapshot& snapshot, double length, const Equilibrium& eq,
                       const std::string& path);
/// All snapshots of a trajectory in the field layout.
void emit_trajectory_csv(const Trajectory& traj, const Equilibrium& eq, const std::string& path);

/// Reads a field CSV back onto a periodic grid of the given period. The
/// grid shape is inferred from the distinct t and x values.
PeriodicField read_field_csv(const std::string& path, double period);

/// convergence: `iter,sup_diff,theta_est`
void emit_report_csv(const ConvergenceReport& report, const std::string& path);
/// stability: `window,sup_c0,sup_c1,ratio_c0,ratio_c1`
void emit_report_csv(const StabilityReport& report, const std::string& path);
/// regularity: `stencil,sup_coarse,sup_fine,ratio`
void emit_report_csv(const RegularityReport& report, const std::string& path);

/// Generic table writer used for auxiliary outputs (distances, sweeps).
void emit_table_csv(const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows, const std::string& path);

} // namespace pe
