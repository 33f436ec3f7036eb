#include "pe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pe/errors.hpp"

namespace pe {

double window_length(const Equilibrium& eq, double length, bool frozen) {
  if (!(length > 0.0)) throw DomainError("window_length: length must be positive");
  return frozen ? length / eq.c_bar : length * eq.A0;
}

namespace {

void check_same_snapshots(const Trajectory& a, const Trajectory& b) {
  if (a.snapshots.size() != b.snapshots.size())
    throw DomainError("distance: trajectories have different snapshot counts");
  for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
    if (a.snapshots[s].state.nx() != b.snapshots[s].state.nx())
      throw DomainError("distance: x-grid mismatch");
    if (std::abs(a.snapshots[s].t - b.snapshots[s].t) > 1e-9 * std::max(1.0, a.snapshots[s].t))
      throw DomainError("distance: snapshot times differ");
  }
}

// The periodic field evaluated at the trajectory's snapshot times.
Trajectory periodic_as_trajectory(const Trajectory& traj, const PeriodicField& periodic) {
  Trajectory ref;
  ref.length = periodic.length();
  ref.dt_used = traj.dt_used;
  ref.horizon = traj.horizon;
  ref.horizon_reached = true;
  const int nx = periodic.nx();
  if (std::abs(traj.length - periodic.length()) > 1e-12 * periodic.length())
    throw DomainError("distance_to_periodic: domain lengths differ");
  for (const Snapshot& s : traj.snapshots) {
    if (s.state.nx() != nx) throw DomainError("distance_to_periodic: x-grid mismatch");
    Snapshot r;
    r.t = s.t;
    r.state.phi1.resize(nx);
    r.state.phi2.resize(nx);
    for (int k = 0; k < nx; ++k) {
      r.state.phi1[k] = interpolate_column(periodic, 0, k, s.t, 3);
      r.state.phi2[k] = interpolate_column(periodic, 1, k, s.t, 3);
    }
    ref.snapshots.push_back(std::move(r));
  }
  return ref;
}

double d_dx(const std::vector<double>& v, int k, double h) {
  const int n = static_cast<int>(v.size());
  if (k == 0) return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  if (k == n - 1) return (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return (v[k + 1] - v[k - 1]) / (2.0 * h);
}

} // namespace

std::vector<double> distance_between(const Trajectory& a, const Trajectory& b) {
  check_same_snapshots(a, b);
  std::vector<double> out(a.snapshots.size(), 0.0);
  for (std::size_t s = 0; s < out.size(); ++s) {
    const FieldPair& p = a.snapshots[s].state;
    const FieldPair& q = b.snapshots[s].state;
    double d = 0.0;
    for (int k = 0; k < p.nx(); ++k)
      d = std::max({d, std::abs(p.phi1[k] - q.phi1[k]), std::abs(p.phi2[k] - q.phi2[k])});
    out[s] = d;
  }
  return out;
}

std::vector<double> distance_to_periodic(const Trajectory& traj, const PeriodicField& periodic) {
  return distance_between(traj, periodic_as_trajectory(traj, periodic));
}

std::vector<double> c1_distance_between(const Trajectory& a, const Trajectory& b) {
  check_same_snapshots(a, b);
  const std::size_t ns = a.snapshots.size();
  std::vector<double> out(ns, 0.0);
  if (ns == 0) return out;
  const int nx = a.snapshots[0].state.nx();
  if (nx < 3) throw DomainError("c1_distance: need at least 3 grid points");
  const double hx = a.length / (nx - 1);
  // Difference series per component.
  std::vector<std::vector<double>> diff[2];
  for (int c = 0; c < 2; ++c) {
    diff[c].resize(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& p = c == 0 ? a.snapshots[s].state.phi1 : a.snapshots[s].state.phi2;
      const auto& q = c == 0 ? b.snapshots[s].state.phi1 : b.snapshots[s].state.phi2;
      diff[c][s].resize(nx);
      for (int k = 0; k < nx; ++k) diff[c][s][k] = p[k] - q[k];
    }
  }
  const double ht = ns > 1 ? a.snapshots[1].t - a.snapshots[0].t : 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    double d = 0.0;
    for (int c = 0; c < 2; ++c) {
      const auto& cur = diff[c][s];
      for (int k = 0; k < nx; ++k) {
        d = std::max(d, std::abs(d_dx(cur, k, hx)));
        if (ns < 3) continue;
        double dt;
        if (s == 0)
          dt = (-3.0 * diff[c][0][k] + 4.0 * diff[c][1][k] - diff[c][2][k]) / (2.0 * ht);
        else if (s == ns - 1)
          dt = (3.0 * diff[c][s][k] - 4.0 * diff[c][s - 1][k] + diff[c][s - 2][k]) / (2.0 * ht);
        else
          dt = (diff[c][s + 1][k] - diff[c][s - 1][k]) / (2.0 * ht);
        d = std::max(d, std::abs(dt));
      }
    }
    out[s] = d;
  }
  return out;
}

std::vector<double> c1_distance_to_periodic(const Trajectory& traj, const PeriodicField& periodic) {
  return c1_distance_between(traj, periodic_as_trajectory(traj, periodic));
}

namespace {

struct WindowFit {
  std::vector<double> ratio;
  double xi = 0.0;
  double xi2 = 0.0;
  std::optional<int> monotone_after;
};

WindowFit fit_windows(const std::vector<double>& sups, double floor) {
  WindowFit f;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double gate = 10.0 * floor;
  const std::size_t n = sups.size();
  f.ratio.assign(n, nan);
  double log_sum = 0.0;
  int count = 0;
  for (std::size_t w = 1; w < n; ++w) {
    if (sups[w - 1] > gate && sups[w] > gate && sups[w - 1] > 0.0 && sups[w] > 0.0) {
      f.ratio[w] = sups[w] / sups[w - 1];
      log_sum += std::log(f.ratio[w]);
      ++count;
    }
  }
  f.xi = count > 0 ? std::exp(log_sum / count) : nan;
  log_sum = 0.0;
  count = 0;
  for (std::size_t w = 2; w < n; ++w) {
    if (sups[w - 2] > gate && sups[w] > gate && sups[w - 2] > 0.0 && sups[w] > 0.0) {
      log_sum += std::log(sups[w] / sups[w - 2]);
      ++count;
    }
  }
  f.xi2 = count > 0 ? std::exp(log_sum / count) : nan;
  if (n >= 2) {
    std::size_t m = n - 1;
    while (m > 0 && sups[m] < sups[m - 1]) --m;
    if (m < n - 1) f.monotone_after = static_cast<int>(m);
  }
  return f;
}

} // namespace

StabilityReport fit_stability(const std::vector<double>& times, const std::vector<double>& c0,
                              const std::vector<double>& c1, double window, double error_floor) {
  if (!(window > 0.0)) throw DomainError("fit_stability: window must be positive");
  if (times.size() != c0.size() || times.size() != c1.size())
    throw DomainError("fit_stability: series lengths differ");
  if (times.empty()) throw InsufficientDataError("fit_stability: no samples");
  const double t0 = times.front();
  const double spacing = times.size() > 1 ? times[1] - times[0] : 0.0;
  const double t_last = times.back();
  // A window counts when the samples cover it up to one sample spacing.
  int windows = 0;
  while (t0 + (windows + 1) * window <= t_last + spacing + 1e-9 * window) ++windows;
  if (windows < 4) throw InsufficientDataError("fit_stability: fewer than 4 full windows of data");

  StabilityReport rep;
  rep.window_length = window;
  rep.error_floor = error_floor;
  rep.window_sup_c0.assign(windows, 0.0);
  rep.window_sup_c1.assign(windows, 0.0);
  std::vector<bool> seen(windows, false);
  for (std::size_t s = 0; s < times.size(); ++s) {
    const int w = static_cast<int>(std::floor((times[s] - t0) / window + 1e-9));
    if (w < 0 || w >= windows) continue;
    seen[w] = true;
    rep.window_sup_c0[w] = std::max(rep.window_sup_c0[w], c0[s]);
    rep.window_sup_c1[w] = std::max(rep.window_sup_c1[w], c1[s]);
  }
  for (int w = 0; w < windows; ++w)
    if (!seen[w]) throw InsufficientDataError("fit_stability: a window contains no samples");

  const WindowFit f0 = fit_windows(rep.window_sup_c0, error_floor);
  const WindowFit f1 = fit_windows(rep.window_sup_c1, error_floor);
  rep.ratio_c0 = f0.ratio;
  rep.ratio_c1 = f1.ratio;
  rep.xi_c0 = f0.xi;
  rep.xi_c1 = f1.xi;
  rep.xi2_c0 = f0.xi2;
  rep.xi2_c1 = f1.xi2;
  rep.monotone_after_c0 = f0.monotone_after;
  rep.monotone_after_c1 = f1.monotone_after;
  return rep;
}

double RegularityReport::max_ratio() const {
  double m = 0.0;
  for (double r : refinement_ratios) m = std::max(m, r);
  return m;
}

SecondDifferences second_differences(const PeriodicField& f) {
  SecondDifferences s;
  const int nt = f.nt();
  const int nx = f.nx();
  const double ht = f.ht();
  const double hx = f.hx();
  for (int c = 0; c < 2; ++c) {
    for (int j = 0; j < nt; ++j) {
      const int jp = (j + 1) % nt;
      const int jm = (j + nt - 1) % nt;
      for (int k = 0; k < nx; ++k) {
        s.d2t = std::max(s.d2t, std::abs(f(c, jp, k) - 2.0 * f(c, j, k) + f(c, jm, k)) / (ht * ht));
        if (k == 0 || k == nx - 1) continue;
        s.d2x = std::max(s.d2x,
                         std::abs(f(c, j, k + 1) - 2.0 * f(c, j, k) + f(c, j, k - 1)) / (hx * hx));
        s.dtdx = std::max(s.dtdx, std::abs(f(c, jp, k + 1) - f(c, jp, k - 1) - f(c, jm, k + 1) +
                                           f(c, jm, k - 1)) /
                                      (4.0 * ht * hx));
      }
    }
  }
  return s;
}

RegularityReport regularity_probe(const PeriodicField& coarse, const PeriodicField& fine) {
  if (coarse.period() != fine.period() || coarse.length() != fine.length())
    throw DomainError("regularity_probe: fields cover different domains");
  const SecondDifferences a = second_differences(coarse);
  const SecondDifferences b = second_differences(fine);
  RegularityReport r;
  r.stencils = {"d2t", "dtdx", "d2x"};
  r.sup_coarse = {a.d2t, a.dtdx, a.d2x};
  r.sup_fine = {b.d2t, b.dtdx, b.d2x};
  for (std::size_t i = 0; i < 3; ++i) {
    const double lo = r.sup_coarse[i];
    const double hi = r.sup_fine[i];
    r.refinement_ratios.push_back(lo == 0.0 && hi == 0.0 ? 1.0
                                  : lo == 0.0            ? std::numeric_limits<double>::infinity()
                                                         : hi / lo);
  }
  return r;
}

FrozenOracle::FrozenOracle(BoundaryForcing forcing, const DampingField& damping,
                           const Equilibrium& eq, double length, Mode mode)
    : forcing_(std::move(forcing)), c_bar_(eq.c_bar), length_(length), tau_(length / eq.c_bar),
      mode_(mode) {
  if (!(length > 0.0)) throw DomainError("FrozenOracle: length must be positive");
  if (!damping.is_zero()) throw DomainError("FrozenOracle: requires beta == 0");
  if (mode == Mode::transport && (forcing_.kappa1 != 0.0 || forcing_.kappa2 != 0.0))
    throw DomainError("FrozenOracle: transport mode requires kappa1 = kappa2 = 0");
  if (mode == Mode::reflection) {
    const double q = std::abs(forcing_.kappa1 * forcing_.kappa2);
    const double scale =
        std::max(forcing_.phi1b.certified_c1_bound(), forcing_.phi2b.certified_c1_bound()) *
        (1.0 + std::max(std::abs(forcing_.kappa1), std::abs(forcing_.kappa2)));
    terms_ = 1;
    double term = scale;
    while (q > 0.0 && term * q >= 1e-14 && terms_ < 100000) {
      term *= q;
      ++terms_;
    }
  }
}

double FrozenOracle::boundary_trace1(double s) const {
  if (mode_ == Mode::transport) return forcing_.phi1b.value(s);
  const double q = forcing_.kappa1 * forcing_.kappa2;
  double v = 0.0;
  double w = 1.0;
  for (int k = 0; k < terms_; ++k) {
    const double sk = s - 2.0 * k * tau_;
    v += w * (forcing_.phi1b.value(sk) + forcing_.kappa1 * forcing_.phi2b.value(sk - tau_));
    w *= q;
  }
  return v;
}

double FrozenOracle::boundary_trace2(double s) const {
  if (mode_ == Mode::transport) return forcing_.phi2b.value(s);
  const double q = forcing_.kappa1 * forcing_.kappa2;
  double v = 0.0;
  double w = 1.0;
  for (int k = 0; k < terms_; ++k) {
    const double sk = s - 2.0 * k * tau_;
    v += w * (forcing_.phi2b.value(sk) + forcing_.kappa2 * forcing_.phi1b.value(sk - tau_));
    w *= q;
  }
  return v;
}

double FrozenOracle::phi1(double t, double x) const {
  return boundary_trace1(t - (length_ - x) / c_bar_);
}

double FrozenOracle::phi2(double t, double x) const { return boundary_trace2(t - x / c_bar_); }

PeriodicField FrozenOracle::sample(int nt, int nx) const {
  PeriodicField f(nt, nx, forcing_.period, length_);
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < nx; ++k) {
      f(0, j, k) = phi1(f.t(j), f.x(k));
      f(1, j, k) = phi2(f.t(j), f.x(k));
    }
  return f;
}

namespace {

struct Conserved {
  std::vector<double> rho;
  std::vector<double> mom;
  std::vector<double> flux;
};

Conserved conserved_row(const std::vector<double>& p1, const std::vector<double>& p2,
                        const Equilibrium& eq) {
  const std::size_t n = p1.size();
  Conserved c;
  c.rho.resize(n);
  c.mom.resize(n);
  c.flux.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const GasState s = state_from_riemann(eq.shifted(p1[k], p2[k]), eq.gamma);
    c.rho[k] = s.rho;
    c.mom[k] = s.rho * s.u;
    c.flux[k] = s.rho * s.u * s.u + std::pow(s.rho, eq.gamma);
  }
  return c;
}

void accumulate_residual(EulerResidual& r, const Conserved& before, const Conserved& now,
                         const Conserved& after, double ht, double hx, double t, double L,
                         const DampingField& damping) {
  const int nx = static_cast<int>(now.rho.size());
  for (int k = 0; k < nx; ++k) {
    const double x = k * L / (nx - 1);
    const double rho_t = (after.rho[k] - before.rho[k]) / (2.0 * ht);
    const double mom_t = (after.mom[k] - before.mom[k]) / (2.0 * ht);
    const double mass = rho_t + d_dx(now.mom, k, hx);
    const double momentum = mom_t + d_dx(now.flux, k, hx) - damping.value(t, x) * now.mom[k];
    r.mass = std::max(r.mass, std::abs(mass));
    r.momentum = std::max(r.momentum, std::abs(momentum));
  }
}

std::vector<double> row_of(const PeriodicField& f, int comp, int j) {
  const auto& v = f.component(comp);
  return {v.begin() + static_cast<std::ptrdiff_t>(j) * f.nx(),
          v.begin() + static_cast<std::ptrdiff_t>(j + 1) * f.nx()};
}

} // namespace

EulerResidual euler_residual(const PeriodicField& field, const Equilibrium& eq,
                             const DampingField& damping) {
  const int nt = field.nt();
  std::vector<Conserved> rows(nt);
  for (int j = 0; j < nt; ++j) rows[j] = conserved_row(row_of(field, 0, j), row_of(field, 1, j), eq);
  EulerResidual r;
  for (int j = 0; j < nt; ++j)
    accumulate_residual(r, rows[(j + nt - 1) % nt], rows[j], rows[(j + 1) % nt], field.ht(),
                        field.hx(), field.t(j), field.length(), damping);
  return r;
}

EulerResidual euler_residual(const Trajectory& traj, const Equilibrium& eq,
                             const DampingField& damping) {
  const std::size_t ns = traj.snapshots.size();
  if (ns < 3) throw DomainError("euler_residual: trajectory needs at least 3 snapshots");
  std::vector<Conserved> rows(ns);
  for (std::size_t s = 0; s < ns; ++s)
    rows[s] = conserved_row(traj.snapshots[s].state.phi1, traj.snapshots[s].state.phi2, eq);
  const int nx = traj.snapshots[0].state.nx();
  const double hx = traj.length / (nx - 1);
  const double ht = traj.snapshot_spacing();
  EulerResidual r;
  for (std::size_t s = 1; s + 1 < ns; ++s)
    accumulate_residual(r, rows[s - 1], rows[s], rows[s + 1], ht, hx, traj.snapshots[s].t,
                        traj.length, damping);
  return r;
}

} // namespace pe
