#include "pe/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pe/errors.hpp"
#include "pe/parallel.hpp"

namespace pe {

double effective_tol(const IterationConfig& config, const BoundaryForcing& forcing) {
  if (config.tol > 0.0) return config.tol;
  return 1e-10 * std::max(forcing.eps_measured, 1e-6);
}

PeriodicField init_zero(const IterationConfig& config, double period, double length) {
  if (config.nt < 8 || config.nx < 8) throw DomainError("IterationConfig: nt, nx must be >= 8");
  return PeriodicField(config.nt, config.nx, period, length);
}

namespace {

void check_config(const IterationConfig& c) {
  if (c.nt < 8 || c.nx < 8) throw DomainError("IterationConfig: nt, nx must be >= 8");
  if (c.max_iter < 1) throw DomainError("IterationConfig: max_iter must be >= 1");
  if (c.substeps_per_cell < 1) throw DomainError("IterationConfig: substeps_per_cell must be >= 1");
  if (c.interpolation_order != 1 && c.interpolation_order != 3)
    throw DomainError("IterationConfig: interpolation_order must be 1 or 3");
  if (c.max_corrector_passes < 1) throw DomainError("IterationConfig: max_corrector_passes >= 1");
}

// Per-family view of the weighted transport equation
//   dG/dy = S + a G  along  dt/dy = nu_f(prev + Phi),  G = F_f phi_f,
// with S = beta/2 F_f [(nu_f(prev) - nu_f(Phi)) (p1 + p2) + nu_f(Phi) p_other]
// and a = nu_f(prev) D1 (family 1) or -nu_f(prev) D2 (family 2).
class FamilySweep {
public:
  FamilySweep(int family, const PeriodicField& prev, const BoundaryForcing& forcing,
              const DampingField& damping, const Equilibrium& eq, const IterationConfig& config,
              const WeightTable& weights, double corrector_tol)
      : family_(family), prev_(prev), forcing_(forcing), damping_(damping), eq_(eq),
        config_(config), weights_(weights), corrector_tol_(corrector_tol) {
    const FamilyPair v = eq.frozen_inverse_speeds();
    nu_frozen_ = family == 1 ? v.first : v.second;
    face_ = family == 1 ? prev.nx() - 1 : 0;
    trace_opts_.substeps_per_cell = config.substeps_per_cell;
    trace_opts_.interpolation_order = config.interpolation_order;
    trace_opts_.frozen = config.frozen_coefficients;
  }

  std::vector<double> run() const {
    return config_.method == SweepMethod::column_march ? column_march() : full_path();
  }

private:
  struct Coeffs {
    double S;
    double a;
    double F;
    double own;
  };

  [[nodiscard]] double nu_prev(double p1, double p2) const {
    if (config_.frozen_coefficients) return nu_frozen_;
    const FamilyPair v = eq_.inverse_speeds(p1, p2);
    return family_ == 1 ? v.first : v.second;
  }

  [[nodiscard]] Coeffs coeffs(double t, int k, double p1, double p2, double F, double D) const {
    const double beta = damping_.value(t, prev_.x(k));
    const double nup = nu_prev(p1, p2);
    const double other = family_ == 1 ? p2 : p1;
    Coeffs c;
    c.S = 0.5 * beta * F * ((nup - nu_frozen_) * (p1 + p2) + nu_frozen_ * other);
    c.a = family_ == 1 ? nup * D : -nup * D;
    c.F = F;
    c.own = family_ == 1 ? p1 : p2;
    return c;
  }

  [[nodiscard]] Coeffs coeffs_on_grid(int j, int k) const {
    return coeffs(prev_.t(j), k, prev_(0, j, k), prev_(1, j, k), weights_.F(family_, j, k),
                  weights_.D(family_, j, k));
  }

  [[nodiscard]] Coeffs coeffs_off_grid(double t, int k) const {
    const int order = config_.interpolation_order;
    return coeffs(t, k, interpolate_column(prev_, 0, k, t, order),
                  interpolate_column(prev_, 1, k, t, order), weights_.F_at(family_, t, k),
                  weights_.D_at(family_, t, k));
  }

  // phi_f at the inflow face, from the reflection condition on the previous
  // iterate's outgoing component.
  [[nodiscard]] double boundary_value(double t, bool on_grid, int j) const {
    const PeriodicSignal& g = family_ == 1 ? forcing_.phi1b : forcing_.phi2b;
    const double kappa = family_ == 1 ? forcing_.kappa1 : forcing_.kappa2;
    const int other = family_ == 1 ? 1 : 0;
    const double reflected = on_grid ? prev_(other, j, face_)
                                     : interpolate_column(prev_, other, face_, t,
                                                          config_.interpolation_order);
    return g.value(t) + kappa * reflected;
  }

  std::vector<double> column_march() const {
    const int nt = prev_.nt();
    const int nx = prev_.nx();
    const double ht = prev_.ht();
    std::vector<double> out(static_cast<std::size_t>(nt) * nx, 0.0);
    std::vector<double> g_up(nt), g_cur(nt);
    for (int j = 0; j < nt; ++j) {
      g_up[j] = boundary_value(prev_.t(j), true, j);
      out[static_cast<std::size_t>(j) * nx + face_] = g_up[j];
    }
    const int step = family_ == 1 ? -1 : 1;
    for (int k = face_ + step; k >= 0 && k < nx; k += step) {
      const int k_up = k - step;
      const double dxs = prev_.x(k_up) - prev_.x(k);
      parallel_for(nt, config_.threads, [&](int j) {
        const double t0 = prev_.t(j);
        const double tau =
            advance_in_cell(prev_, eq_, family_, t0, prev_.x(k), prev_.x(k_up),
                            config_.substeps_per_cell, trace_opts_);
        const double g_foot =
            interpolate_periodic(g_up.data(), nt, 1, ht, tau, config_.interpolation_order);
        const Coeffs foot = coeffs_off_grid(tau, k_up);
        const Coeffs node = coeffs_on_grid(j, k);
        const double fixed = foot.S + foot.a * g_foot + node.S;
        double g = node.F * node.own;
        if (node.a == 0.0) {
          g = g_foot - 0.5 * dxs * fixed;
        } else {
          bool settled = false;
          for (int pass = 0; pass < config_.max_corrector_passes; ++pass) {
            const double g_new = g_foot - 0.5 * dxs * (fixed + node.a * g);
            const double change = std::abs(g_new - g);
            g = g_new;
            if (change <= corrector_tol_) {
              settled = true;
              break;
            }
          }
          if (!settled) throw CorrectorError("sweep: predictor-corrector did not settle");
        }
        g_cur[j] = g;
        out[static_cast<std::size_t>(j) * nx + k] = g / node.F;
      });
      std::swap(g_up, g_cur);
    }
    return out;
  }

  std::vector<double> full_path() const {
    const int nt = prev_.nt();
    const int nx = prev_.nx();
    std::vector<double> out(static_cast<std::size_t>(nt) * nx, 0.0);
    parallel_for(nt, config_.threads, [&](int j) {
      std::vector<Coeffs> cs;
      std::vector<double> g_old, g_new;
      for (int k = 0; k < nx; ++k) {
        const CharPath path = trace(prev_, eq_, family_, {prev_.t(j), prev_.x(k)}, trace_opts_);
        const std::size_t n = path.nodes.size();
        const int step = family_ == 1 ? 1 : -1;
        cs.resize(n);
        for (std::size_t m = 0; m < n; ++m) {
          const int col = k + step * static_cast<int>(m);
          cs[m] = m == 0 ? coeffs_on_grid(j, k) : coeffs_off_grid(path.nodes[m].t, col);
        }
        const double bc = n == 1 ? boundary_value(prev_.t(j), true, j)
                                 : boundary_value(path.arrival_t, false, j);
        g_old.resize(n);
        g_new.resize(n);
        for (std::size_t m = 0; m < n; ++m) g_old[m] = cs[m].F * cs[m].own;
        g_old[n - 1] = bc;
        bool settled = false;
        for (int pass = 0; pass < config_.max_corrector_passes; ++pass) {
          g_new[n - 1] = bc;
          double change = 0.0;
          for (std::size_t m = n - 1; m-- > 0;) {
            const double dx = path.nodes[m + 1].x - path.nodes[m].x;
            g_new[m] = g_new[m + 1] - 0.5 * dx *
                                          (cs[m].S + cs[m].a * g_old[m] + cs[m + 1].S +
                                           cs[m + 1].a * g_old[m + 1]);
            change = std::max(change, std::abs(g_new[m] - g_old[m]));
          }
          std::swap(g_old, g_new);
          if (change <= corrector_tol_) {
            settled = true;
            break;
          }
        }
        if (!settled) throw CorrectorError("sweep: predictor-corrector did not settle");
        out[static_cast<std::size_t>(j) * nx + k] = g_old[0] / cs[0].F;
      }
    });
    return out;
  }

  int family_;
  const PeriodicField& prev_;
  const BoundaryForcing& forcing_;
  const DampingField& damping_;
  const Equilibrium& eq_;
  const IterationConfig& config_;
  const WeightTable& weights_;
  double corrector_tol_;
  double nu_frozen_ = 0.0;
  int face_ = 0;
  TraceOptions trace_opts_;
};

std::vector<double> sweep(int family, const PeriodicField& prev, const BoundaryForcing& forcing,
                          const DampingField& damping, const Equilibrium& eq,
                          const IterationConfig& config, const WeightTable& weights) {
  const double corrector_tol = 0.1 * effective_tol(config, forcing);
  return FamilySweep(family, prev, forcing, damping, eq, config, weights, corrector_tol).run();
}

WeightTable make_weights(const PeriodicField& prev, const DampingField& damping,
                         const Equilibrium& eq) {
  return WeightTable(damping, eq, prev.nt(), prev.nx(), prev.period(), prev.length());
}

} // namespace

std::vector<double> sweep_family1(const PeriodicField& prev, const BoundaryForcing& forcing,
                                  const DampingField& damping, const Equilibrium& eq,
                                  const IterationConfig& config) {
  check_config(config);
  return sweep(1, prev, forcing, damping, eq, config, make_weights(prev, damping, eq));
}

std::vector<double> sweep_family2(const PeriodicField& prev, const BoundaryForcing& forcing,
                                  const DampingField& damping, const Equilibrium& eq,
                                  const IterationConfig& config) {
  check_config(config);
  return sweep(2, prev, forcing, damping, eq, config, make_weights(prev, damping, eq));
}

namespace {

IterateResult iterate_with(const PeriodicField& prev, const BoundaryForcing& forcing,
                           const DampingField& damping, const Equilibrium& eq,
                           const IterationConfig& config, const WeightTable& weights) {
  IterateResult r;
  r.next = PeriodicField(prev.nt(), prev.nx(), prev.period(), prev.length());
  r.next.component(0) = sweep(1, prev, forcing, damping, eq, config, weights);
  r.next.component(1) = sweep(2, prev, forcing, damping, eq, config, weights);
  r.sup_diff = r.next.sup_diff(prev);
  return r;
}

double geometric_mean_tail(const std::vector<std::pair<int, double>>& ratios, std::size_t count) {
  if (ratios.empty()) return 0.0;
  const std::size_t n = std::min(count, ratios.size());
  double s = 0.0;
  for (std::size_t i = ratios.size() - n; i < ratios.size(); ++i) s += std::log(ratios[i].second);
  return std::exp(s / static_cast<double>(n));
}

} // namespace

IterateResult iterate_once(const PeriodicField& prev, const BoundaryForcing& forcing,
                           const DampingField& damping, const Equilibrium& eq,
                           const IterationConfig& config) {
  check_config(config);
  return iterate_with(prev, forcing, damping, eq, config, make_weights(prev, damping, eq));
}

PeriodicSolution solve_periodic(const BoundaryForcing& forcing, const DampingField& damping,
                                const Equilibrium& eq, const IterationConfig& config) {
  check_config(config);
  if (!(std::abs(forcing.kappa1) < 1.0 && std::abs(forcing.kappa2) < 1.0))
    throw DomainError("solve_periodic: reflection coefficients need |kappa_i| < 1");
  if (std::abs(forcing.period - damping.period()) > 1e-12 * forcing.period)
    throw DomainError("solve_periodic: forcing and damping periods differ");

  ConvergenceReport rep;
  rep.tol = effective_tol(config, forcing);
  PeriodicField field = init_zero(config, forcing.period, damping.length());
  const WeightTable weights = make_weights(field, damping, eq);
  int increases = 0;
  auto finish = [&](PeriodicField& f) {
    rep.final_c0_norm = f.sup_norm();
    rep.final_c1_norm = c1_norm(f);
    rep.theta = geometric_mean_tail(rep.theta_estimates, 3);
  };
  for (int l = 1; l <= config.max_iter; ++l) {
    IterateResult it = iterate_with(field, forcing, damping, eq, config, weights);
    rep.diffs.push_back(it.sup_diff);
    rep.iterations_used = l;
    if (l >= 2) {
      const double before = rep.diffs[l - 2];
      if (before > 10.0 * rep.tol) rep.theta_estimates.emplace_back(l, it.sup_diff / before);
      increases = it.sup_diff > before ? increases + 1 : 0;
    }
    field = std::move(it.next);
    if (it.sup_diff < rep.tol) {
      rep.converged = true;
      finish(field);
      return {std::move(field), std::move(rep)};
    }
    if (increases >= 3) {
      finish(field);
      std::ostringstream os;
      os << "solve_periodic: iterates diverge (three consecutive increases, last diff "
         << it.sup_diff << ")";
      throw NonContractionError(os.str(), rep, field);
    }
  }
  finish(field);
  std::ostringstream os;
  os << "solve_periodic: no convergence in " << config.max_iter << " iterations (last diff "
     << rep.diffs.back() << ", tol " << rep.tol << ")";
  throw MaxIterError(os.str(), rep, field);
}

namespace {

double d_t(const PeriodicField& f, int c, int j, int k) {
  const int nt = f.nt();
  return (f(c, (j + 1) % nt, k) - f(c, (j + nt - 1) % nt, k)) / (2.0 * f.ht());
}

double d_x(const PeriodicField& f, int c, int j, int k) {
  const int nx = f.nx();
  const double h = f.hx();
  if (k == 0) return (-3.0 * f(c, j, 0) + 4.0 * f(c, j, 1) - f(c, j, 2)) / (2.0 * h);
  if (k == nx - 1)
    return (3.0 * f(c, j, nx - 1) - 4.0 * f(c, j, nx - 2) + f(c, j, nx - 3)) / (2.0 * h);
  return (f(c, j, k + 1) - f(c, j, k - 1)) / (2.0 * h);
}

} // namespace

double c1_norm(const PeriodicField& field) {
  double s = field.sup_norm();
  for (int c = 0; c < 2; ++c)
    for (int j = 0; j < field.nt(); ++j)
      for (int k = 0; k < field.nx(); ++k)
        s = std::max({s, std::abs(d_t(field, c, j, k)), std::abs(d_x(field, c, j, k))});
  return s;
}

PdeResidual pde_residual(const PeriodicField& solution, const BoundaryForcing& forcing,
                         const DampingField& damping, const Equilibrium& eq, bool frozen) {
  if (solution.nt() < 16 || solution.nx() < 16)
    throw DomainError("pde_residual: grid must be at least 16 x 16");
  PdeResidual r;
  const int nx = solution.nx();
  for (int j = 0; j < solution.nt(); ++j) {
    const double t = solution.t(j);
    for (int k = 0; k < nx; ++k) {
      const double p1 = solution(0, j, k);
      const double p2 = solution(1, j, k);
      const FamilyPair lam = frozen ? FamilyPair{-eq.c_bar, eq.c_bar} : eq.speeds(p1, p2);
      const double src = 0.5 * damping.value(t, solution.x(k)) * (p1 + p2);
      r.residual1 = std::max(r.residual1, std::abs(d_t(solution, 0, j, k) +
                                                   lam.first * d_x(solution, 0, j, k) - src));
      r.residual2 = std::max(r.residual2, std::abs(d_t(solution, 1, j, k) +
                                                   lam.second * d_x(solution, 1, j, k) - src));
    }
    const double left = solution(1, j, 0) - forcing.phi2b.value(t) - forcing.kappa2 * solution(0, j, 0);
    const double right =
        solution(0, j, nx - 1) - forcing.phi1b.value(t) - forcing.kappa1 * solution(1, j, nx - 1);
    r.boundary_mismatch = std::max({r.boundary_mismatch, std::abs(left), std::abs(right)});
  }
  return r;
}

} // namespace pe
