#include "pe/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pe/errors.hpp"
#include "pe/interp.hpp"

namespace pe {

PeriodicField::PeriodicField(int nt, int nx, double period, double length)
    : nt_(nt), nx_(nx), period_(period), length_(length) {
  if (nt < 1 || nx < 2) throw DomainError("PeriodicField: need nt >= 1 and nx >= 2");
  if (!(period > 0.0) || !(length > 0.0))
    throw DomainError("PeriodicField: period and length must be positive");
  const std::size_t n = static_cast<std::size_t>(nt) * static_cast<std::size_t>(nx);
  data_[0].assign(n, 0.0);
  data_[1].assign(n, 0.0);
}

double PeriodicField::sup_norm() const {
  double s = 0.0;
  for (const auto& c : data_)
    for (double v : c) s = std::max(s, std::abs(v));
  return s;
}

bool PeriodicField::same_grid(const PeriodicField& other) const {
  return nt_ == other.nt_ && nx_ == other.nx_ && period_ == other.period_ &&
         length_ == other.length_;
}

double PeriodicField::sup_diff(const PeriodicField& other) const {
  if (!same_grid(other)) throw DomainError("sup_diff: grid mismatch");
  double s = 0.0;
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < data_[c].size(); ++i)
      s = std::max(s, std::abs(data_[c][i] - other.data_[c][i]));
  return s;
}

double interpolate_periodic(const double* samples, int n, int stride, double h, double t,
                            int order) {
  const auto loc = interp::locate_periodic(t, h, n);
  if (order == 1) {
    const double a = samples[static_cast<std::size_t>(loc.base) * stride];
    const double b = samples[static_cast<std::size_t>(interp::wrap_index(loc.base + 1, n)) * stride];
    return a + loc.frac * (b - a);
  }
  if (loc.frac == 0.0) return samples[static_cast<std::size_t>(loc.base) * stride];
  const auto w = interp::lagrange4(loc.frac);
  double v = 0.0;
  for (int a = 0; a < 4; ++a)
    v += w[a] * samples[static_cast<std::size_t>(interp::wrap_index(loc.base - 1 + a, n)) * stride];
  return v;
}

double interpolate_column(const PeriodicField& field, int component, int k, double t, int order) {
  return interpolate_periodic(field.component(component).data() + k, field.nt(), field.nx(),
                              field.ht(), t, order);
}

double interpolate(const PeriodicField& field, int component, double t, double x, int order) {
  const double L = field.length();
  const double slack = 1e-12 * std::max(1.0, L);
  if (x < -slack || x > L + slack) {
    std::ostringstream os;
    os << "interpolate: x = " << x << " outside [0, " << L << "]";
    throw DomainError(os.str());
  }
  x = std::clamp(x, 0.0, L);
  const auto loc = interp::locate_linear(x, field.hx(), field.nx());
  const double a = interpolate_column(field, component, loc.base, t, order);
  if (loc.frac == 0.0) return a;
  const double b = interpolate_column(field, component, loc.base + 1, t, order);
  return a + loc.frac * (b - a);
}

namespace {

int cell_of(const PeriodicField& field, double xa, double xb) {
  const double lo = std::min(xa, xb);
  int c = static_cast<int>(std::floor(lo / field.hx() + 1e-9));
  return std::clamp(c, 0, field.nx() - 2);
}

double family_nu(const Equilibrium& eq, int family, double phi1, double phi2) {
  const FamilyPair v = eq.inverse_speeds(phi1, phi2);
  return family == 1 ? v.first : v.second;
}

} // namespace

double advance_in_cell(const PeriodicField& field, const Equilibrium& eq, int family, double t0,
                       double x_start, double x_end, int substeps, const TraceOptions& opts) {
  if (substeps < 1) throw DomainError("trace: substeps_per_cell must be >= 1");
  if (family != 1 && family != 2) throw DomainError("trace: family must be 1 or 2");
  if (opts.frozen) {
    const FamilyPair v = eq.frozen_inverse_speeds();
    return t0 + (family == 1 ? v.first : v.second) * (x_end - x_start);
  }
  const int c = cell_of(field, x_start, x_end);
  const double xc = field.x(c);
  const double hx = field.hx();
  const int order = opts.interpolation_order;
  auto rhs = [&](double t, double x) {
    const double w = (x - xc) / hx;
    const double p1 = (1.0 - w) * interpolate_column(field, 0, c, t, order) +
                      w * interpolate_column(field, 0, c + 1, t, order);
    const double p2 = (1.0 - w) * interpolate_column(field, 1, c, t, order) +
                      w * interpolate_column(field, 1, c + 1, t, order);
    return family_nu(eq, family, p1, p2);
  };
  const double h = (x_end - x_start) / substeps;
  double t = t0;
  double x = x_start;
  for (int s = 0; s < substeps; ++s) {
    const double k1 = rhs(t, x);
    const double k2 = rhs(t + 0.5 * h * k1, x + 0.5 * h);
    const double k3 = rhs(t + 0.5 * h * k2, x + 0.5 * h);
    const double k4 = rhs(t + h * k3, x + h);
    t += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    x = (s + 1 == substeps) ? x_end : x_start + (s + 1) * h;
  }
  return t;
}

CharPath trace_to(const PeriodicField& field, const Equilibrium& eq, int family, PathNode anchor,
                  double x_end, const TraceOptions& opts) {
  if (opts.substeps_per_cell < 1) throw DomainError("trace: substeps_per_cell must be >= 1");
  if (family != 1 && family != 2) throw DomainError("trace: family must be 1 or 2");
  const double L = field.length();
  const double slack = 1e-12 * std::max(1.0, L);
  if (anchor.x < -slack || anchor.x > L + slack || x_end < -slack || x_end > L + slack)
    throw DomainError("trace: anchor or end point outside [0, L]");
  anchor.x = std::clamp(anchor.x, 0.0, L);
  x_end = std::clamp(x_end, 0.0, L);

  CharPath path;
  path.family = family;
  path.nodes.push_back(anchor);
  const double hx = field.hx();
  const double u = anchor.x / hx;
  const double ur = std::round(u);
  const bool on_grid = std::abs(u - ur) < 1e-9;
  const int dir = x_end > anchor.x ? 1 : (x_end < anchor.x ? -1 : 0);

  double t = anchor.t;
  double x = anchor.x;
  if (dir != 0) {
    int next = dir > 0 ? (on_grid ? int(ur) + 1 : int(std::floor(u)) + 1)
                       : (on_grid ? int(ur) - 1 : int(std::ceil(u)) - 1);
    while (true) {
      const double xn = (next >= 0 && next < field.nx()) ? field.x(next) : x_end;
      const bool last = dir > 0 ? xn >= x_end : xn <= x_end;
      const double target = last ? x_end : xn;
      t = advance_in_cell(field, eq, family, t, x, target, opts.substeps_per_cell, opts);
      x = target;
      path.nodes.push_back({t, x});
      if (last) break;
      next += dir;
    }
  }
  path.arrival_t = t;
  return path;
}

CharPath trace(const PeriodicField& field, const Equilibrium& eq, int family, PathNode anchor,
               const TraceOptions& opts) {
  return trace_to(field, eq, family, anchor, family == 1 ? field.length() : 0.0, opts);
}

double weight_F(const DampingField& damping, const Equilibrium& eq, int family, double t, double x,
                int quad_points) {
  if (quad_points < 2) throw DomainError("weight_F: quad_points must be >= 2");
  if (family != 1 && family != 2) throw DomainError("weight_F: family must be 1 or 2");
  const double L = damping.length();
  const double a = family == 1 ? x : 0.0;
  const double b = family == 1 ? L : x;
  if (b <= a) return 1.0;
  int n = quad_points - 1; // intervals
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = damping.value(t, a) + damping.value(t, b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * damping.value(t, a + i * h);
  const double integral = s * h / 3.0;
  const FamilyPair v = eq.frozen_inverse_speeds();
  return family == 1 ? std::exp(0.5 * v.first * integral) : std::exp(-0.5 * v.second * integral);
}

double weight_bound(const DampingField& damping, const Equilibrium& eq) {
  return std::exp(-0.5 * damping.beta_star() * eq.A0 * damping.length());
}

double path_integrate(const CharPath& path,
                      const std::function<double(double, double)>& integrand) {
  double s = 0.0;
  for (std::size_t i = 1; i < path.nodes.size(); ++i) {
    const PathNode& a = path.nodes[i - 1];
    const PathNode& b = path.nodes[i];
    s += 0.5 * (b.x - a.x) * (integrand(a.t, a.x) + integrand(b.t, b.x));
  }
  return s;
}

WeightTable::WeightTable(const DampingField& damping, const Equilibrium& eq, int nt, int nx,
                         double period, double length)
    : nt_(nt), nx_(nx), ht_(period / nt), time_independent_(damping.is_time_independent()) {
  const double hx = length / (nx - 1);
  const FamilyPair v = eq.frozen_inverse_speeds();
  const int rows = time_independent_ ? 1 : nt;
  for (int f = 0; f < 2; ++f) {
    logF_[f].assign(static_cast<std::size_t>(rows) * nx, 0.0);
    D_[f].assign(static_cast<std::size_t>(rows) * nx, 0.0);
  }
  std::vector<double> cb(nx - 1), cd(nx - 1);
  for (int j = 0; j < rows; ++j) {
    const double t = period * j / nt;
    for (int k = 0; k + 1 < nx; ++k) {
      const double xa = hx * k;
      const double xb = k + 2 == nx ? length : hx * (k + 1);
      const double xm = 0.5 * (xa + xb);
      const double w = (xb - xa) / 6.0;
      cb[k] = w * (damping.value(t, xa) + 4.0 * damping.value(t, xm) + damping.value(t, xb));
      cd[k] = w * (damping.dt(t, xa) + 4.0 * damping.dt(t, xm) + damping.dt(t, xb));
    }
    double* lf1 = logF_[0].data() + static_cast<std::size_t>(j) * nx;
    double* lf2 = logF_[1].data() + static_cast<std::size_t>(j) * nx;
    double* d1 = D_[0].data() + static_cast<std::size_t>(j) * nx;
    double* d2 = D_[1].data() + static_cast<std::size_t>(j) * nx;
    // family 1 accumulates from x = L leftwards, family 2 from x = 0.
    double ib = 0.0, id = 0.0;
    for (int k = nx - 1; k >= 0; --k) {
      if (k < nx - 1) {
        ib += cb[k];
        id += cd[k];
      }
      lf1[k] = 0.5 * v.first * ib;
      d1[k] = 0.5 * v.first * id;
    }
    ib = 0.0;
    id = 0.0;
    for (int k = 0; k < nx; ++k) {
      if (k > 0) {
        ib += cb[k - 1];
        id += cd[k - 1];
      }
      lf2[k] = -0.5 * v.second * ib;
      d2[k] = 0.5 * v.second * id;
    }
  }
}

double WeightTable::F(int family, int j, int k) const {
  const int row = time_independent_ ? 0 : j;
  return std::exp(logF_[family - 1][static_cast<std::size_t>(row) * nx_ + k]);
}

double WeightTable::D(int family, int j, int k) const {
  const int row = time_independent_ ? 0 : j;
  return D_[family - 1][static_cast<std::size_t>(row) * nx_ + k];
}

double WeightTable::F_at(int family, double t, int k) const {
  if (time_independent_) return std::exp(logF_[family - 1][k]);
  return std::exp(interpolate_periodic(logF_[family - 1].data() + k, nt_, nx_, ht_, t, 3));
}

double WeightTable::D_at(int family, double t, int k) const {
  if (time_independent_) return D_[family - 1][k];
  return interpolate_periodic(D_[family - 1].data() + k, nt_, nx_, ht_, t, 3);
}

} // namespace pe
