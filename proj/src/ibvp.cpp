#include "pe/ibvp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pe/errors.hpp"
#include "pe/interp.hpp"
#include "pe/parallel.hpp"

namespace pe {

double FieldPair::sup_norm() const {
  double s = 0.0;
  for (double v : phi1) s = std::max(s, std::abs(v));
  for (double v : phi2) s = std::max(s, std::abs(v));
  return s;
}

BumpShape BumpShape::quartic(double length) {
  // x^2 (L - x)^2 = L^2 x^2 - 2 L x^3 + x^4
  return {{0.0, 0.0, length * length, -2.0 * length, 1.0}};
}

double BumpShape::value(double x) const {
  double v = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 0;) v = v * x + coeffs[j];
  return v;
}

double BumpShape::derivative(double x) const {
  double v = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 1;) v = v * x + static_cast<double>(j) * coeffs[j];
  return v;
}

InitialData compatible_initial_data(const PeriodicField& periodic, double amplitude1,
                                    double amplitude2, const BumpShape& shape) {
  const double L = periodic.length();
  const int nx = periodic.nx();
  InitialData init;
  init.length = L;
  init.phi0.phi1.resize(nx);
  init.phi0.phi2.resize(nx);
  double scale = 0.0;
  if (amplitude1 != 0.0 || amplitude2 != 0.0) {
    constexpr int dense = 8192;
    for (int i = 0; i <= dense; ++i) scale = std::max(scale, std::abs(shape.value(L * i / dense)));
    if (!(scale > 0.0)) throw DomainError("compatible_initial_data: bump shape is identically zero");
    const double corner = std::max({std::abs(shape.value(0.0)), std::abs(shape.value(L)),
                                    std::abs(shape.derivative(0.0)) * L,
                                    std::abs(shape.derivative(L)) * L}) / scale;
    if (corner > 1e-10)
      throw DomainError("compatible_initial_data: bump must vanish with its derivative at x = 0, L");
  }
  for (int k = 0; k < nx; ++k) {
    const double psi = scale > 0.0 ? shape.value(periodic.x(k)) / scale : 0.0;
    init.phi0.phi1[k] = periodic(0, 0, k) + amplitude1 * psi;
    init.phi0.phi2[k] = periodic(1, 0, k) + amplitude2 * psi;
  }
  init.compat_order = 1;
  return init;
}

InitialData compatible_initial_data(const PeriodicField& periodic, double amplitude) {
  return compatible_initial_data(periodic, amplitude, amplitude,
                                 BumpShape::quartic(periodic.length()));
}

namespace {

double interp_x(const std::vector<double>& v, double h, double x) {
  const int n = static_cast<int>(v.size());
  const auto loc = interp::locate_clamped(x, h, n);
  const auto w = interp::lagrange4(loc.frac);
  return w[0] * v[loc.base - 1] + w[1] * v[loc.base] + w[2] * v[loc.base + 1] +
         w[3] * v[loc.base + 2];
}

FamilyPair lambda(const Equilibrium& eq, bool frozen, double p1, double p2) {
  return frozen ? FamilyPair{-eq.c_bar, eq.c_bar} : eq.speeds(p1, p2);
}

void apply_boundary(FieldPair& s, double t, const BoundaryForcing& forcing) {
  const int nx = s.nx();
  s.phi2[0] = forcing.phi2b.value(t) + forcing.kappa2 * s.phi1[0];
  s.phi1[nx - 1] = forcing.phi1b.value(t) + forcing.kappa1 * s.phi2[nx - 1];
}

void check_admissible(const FieldPair& s, const Equilibrium& eq, double t, double hx) {
  for (int k = 0; k < s.nx(); ++k) {
    if (!eq.in_neighborhood(s.phi1[k], s.phi2[k])) {
      std::ostringstream os;
      os << "ibvp: state left the admissible neighborhood at t = " << t << ", x = " << k * hx
         << " (phi1 = " << s.phi1[k] << ", phi2 = " << s.phi2[k] << ")";
      throw AdmissibilityError(os.str());
    }
  }
}

} // namespace

FieldPair step(const FieldPair& state, double t, double length, const BoundaryForcing& forcing,
               const DampingField& damping, const Equilibrium& eq, double dt,
               const StepOptions& opts) {
  const int nx = state.nx();
  if (nx < 4 || static_cast<int>(state.phi2.size()) != nx)
    throw DomainError("step: state needs two arrays of equal length >= 4");
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  const double hx = length / (nx - 1);

  double max_speed = 0.0;
  for (int k = 0; k < nx; ++k) {
    const FamilyPair l = lambda(eq, opts.frozen, state.phi1[k], state.phi2[k]);
    max_speed = std::max({max_speed, std::abs(l.first), std::abs(l.second)});
  }
  const double courant = dt * max_speed / hx;
  if (courant > opts.cfl_fraction * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "step: Courant number " << courant << " exceeds cfl_fraction " << opts.cfl_fraction;
    throw CflError(os.str());
  }

  const double t1 = t + dt;
  auto clamp_x = [&](double x) { return std::clamp(x, 0.0, length); };
  auto source = [&](double tt, double x, double p1, double p2) {
    return 0.5 * damping.value(tt, x) * (p1 + p2);
  };

  // Predictor: feet traced with the departure speed, explicit source.
  FieldPair pred{std::vector<double>(nx), std::vector<double>(nx)};
  parallel_for(nx, opts.threads, [&](int k) {
    const double x = k * hx;
    const FamilyPair l = lambda(eq, opts.frozen, state.phi1[k], state.phi2[k]);
    for (int fam = 0; fam < 2; ++fam) {
      const double foot = clamp_x(x - dt * (fam == 0 ? l.first : l.second));
      const double p1 = interp_x(state.phi1, hx, foot);
      const double p2 = interp_x(state.phi2, hx, foot);
      (fam == 0 ? pred.phi1 : pred.phi2)[k] = (fam == 0 ? p1 : p2) + dt * source(t, foot, p1, p2);
    }
  });
  apply_boundary(pred, t1, forcing);

  // Corrector: speed averaged between the predicted arrival and the foot,
  // trapezoidal source between foot and arrival.
  FieldPair next{std::vector<double>(nx), std::vector<double>(nx)};
  parallel_for(nx, opts.threads, [&](int k) {
    const double x = k * hx;
    const FamilyPair l0 = lambda(eq, opts.frozen, state.phi1[k], state.phi2[k]);
    const FamilyPair la = lambda(eq, opts.frozen, pred.phi1[k], pred.phi2[k]);
    const double s_arrival = source(t1, x, pred.phi1[k], pred.phi2[k]);
    for (int fam = 0; fam < 2; ++fam) {
      const double foot0 = clamp_x(x - dt * (fam == 0 ? l0.first : l0.second));
      const FamilyPair lf = lambda(eq, opts.frozen, interp_x(state.phi1, hx, foot0),
                                   interp_x(state.phi2, hx, foot0));
      const double lam = 0.5 * ((fam == 0 ? lf.first : lf.second) + (fam == 0 ? la.first : la.second));
      const double foot = clamp_x(x - dt * lam);
      const double p1 = interp_x(state.phi1, hx, foot);
      const double p2 = interp_x(state.phi2, hx, foot);
      (fam == 0 ? next.phi1 : next.phi2)[k] =
          (fam == 0 ? p1 : p2) + 0.5 * dt * (source(t, foot, p1, p2) + s_arrival);
    }
  });
  apply_boundary(next, t1, forcing);
  if (!opts.frozen) check_admissible(next, eq, t1, hx);
  return next;
}

double Trajectory::snapshot_spacing() const {
  if (snapshots.size() < 2) return 0.0;
  return snapshots[1].t - snapshots[0].t;
}

Trajectory solve_ibvp(const InitialData& init, const BoundaryForcing& forcing,
                      const DampingField& damping, const Equilibrium& eq,
                      const IbvpOptions& opts) {
  if (!(opts.horizon > 0.0)) throw DomainError("solve_ibvp: horizon must be positive");
  if (!(opts.snapshot_every > 0.0) || opts.snapshot_every > opts.horizon)
    throw DomainError("solve_ibvp: snapshot_every must lie in (0, horizon]");
  if (!(opts.cfl_fraction > 0.0) || opts.cfl_fraction > 1.0)
    throw DomainError("solve_ibvp: cfl_fraction must lie in (0, 1]");
  const int nx = init.phi0.nx();
  if (nx < 4) throw DomainError("solve_ibvp: need at least 4 grid points");
  const double hx = init.length / (nx - 1);
  if (!opts.frozen) check_admissible(init.phi0, eq, 0.0, hx);

  const double speed = opts.frozen ? eq.c_bar : eq.max_speed();
  const double dt_max = opts.cfl_fraction * hx / speed;
  const long steps_per_snapshot = static_cast<long>(std::ceil(opts.snapshot_every / dt_max - 1e-12));
  const double dt = opts.snapshot_every / static_cast<double>(steps_per_snapshot);
  const long snapshots = std::lround(opts.horizon / opts.snapshot_every);

  StepOptions so;
  so.cfl_fraction = opts.cfl_fraction;
  so.frozen = opts.frozen;
  so.threads = opts.threads;

  Trajectory traj;
  traj.dt_used = dt;
  traj.horizon = opts.snapshot_every * static_cast<double>(snapshots);
  traj.length = init.length;
  traj.snapshots.reserve(static_cast<std::size_t>(snapshots) + 1);
  traj.snapshots.push_back({0.0, init.phi0});
  FieldPair state = init.phi0;
  for (long s = 1; s <= snapshots; ++s) {
    const double t_begin = opts.snapshot_every * static_cast<double>(s - 1);
    for (long i = 0; i < steps_per_snapshot; ++i) {
      const double t = t_begin + dt * static_cast<double>(i);
      state = step(state, t, init.length, forcing, damping, eq, dt, so);
    }
    traj.snapshots.push_back({opts.snapshot_every * static_cast<double>(s), state});
  }
  traj.horizon_reached = true;
  return traj;
}

} // namespace pe
