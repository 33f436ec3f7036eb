#include "pe/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pe/errors.hpp"
#include "pe/interp.hpp"

namespace pe {

double sound_speed(double rho, double gamma) {
  if (!(rho > 0.0)) throw DomainError("sound_speed: density must be positive");
  if (!(gamma > 1.0)) throw DomainError("sound_speed: gamma must exceed 1");
  return std::sqrt(gamma) * std::pow(rho, 0.5 * (gamma - 1.0));
}

RiemannPair riemann_from_state(GasState state, double gamma) {
  const double c = sound_speed(state.rho, gamma);
  const double a = c / (gamma - 1.0);
  return {0.5 * state.u - a, 0.5 * state.u + a};
}

GasState state_from_riemann(RiemannPair pair, double gamma) {
  if (!(gamma > 1.0)) throw DomainError("state_from_riemann: gamma must exceed 1");
  if (!(pair.n > pair.m)) throw DomainError("state_from_riemann: n <= m (vacuum)");
  const double c = 0.5 * (gamma - 1.0) * (pair.n - pair.m);
  const double rho = std::pow(c * c / gamma, 1.0 / (gamma - 1.0));
  return {rho, pair.m + pair.n};
}

FamilyPair eigenvalues(RiemannPair pair, double gamma) {
  const double a = 0.5 * (gamma + 1.0);
  const double b = 0.5 * (3.0 - gamma);
  return {a * pair.m + b * pair.n, b * pair.m + a * pair.n};
}

FamilyPair nu(RiemannPair pair, double gamma, double margin) {
  const FamilyPair lam = eigenvalues(pair, gamma);
  if (!(lam.first < 0.0 && -lam.first >= margin && lam.second > 0.0 && lam.second >= margin)) {
    std::ostringstream os;
    os << "state not subsonic: lambda1=" << lam.first << " lambda2=" << lam.second;
    throw AdmissibilityError(os.str());
  }
  return {1.0 / lam.first, 1.0 / lam.second};
}

FamilyPair Equilibrium::speeds(double phi1, double phi2) const {
  return eigenvalues(shifted(phi1, phi2), gamma);
}

bool Equilibrium::in_neighborhood(double phi1, double phi2) const {
  return std::abs(phi1) <= neighborhood_radius && std::abs(phi2) <= neighborhood_radius;
}

FamilyPair Equilibrium::inverse_speeds(double phi1, double phi2) const {
  if (!in_neighborhood(phi1, phi2)) {
    std::ostringstream os;
    os << "perturbation (" << phi1 << ", " << phi2 << ") outside neighborhood radius "
       << neighborhood_radius;
    throw AdmissibilityError(os.str());
  }
  return nu(shifted(phi1, phi2), gamma, sonic_margin());
}

namespace {
// Sum of |d lambda_i / d phi_j| over j; identical for both families.
double speed_sensitivity(double gamma) {
  return 0.5 * (gamma + 1.0) + 0.5 * std::abs(3.0 - gamma);
}
} // namespace

double Equilibrium::max_speed() const {
  return c_bar + speed_sensitivity(gamma) * neighborhood_radius;
}

double default_neighborhood_radius(double rho_bar, double gamma) {
  return 0.1 * sound_speed(rho_bar, gamma);
}

Equilibrium make_equilibrium(double rho_bar, double gamma, double radius) {
  if (!(radius >= 0.0)) throw DomainError("make_equilibrium: radius must be non-negative");
  Equilibrium eq;
  eq.rho_bar = rho_bar;
  eq.gamma = gamma;
  eq.c_bar = sound_speed(rho_bar, gamma);
  eq.n_bar = eq.c_bar / (gamma - 1.0);
  eq.m_bar = -eq.n_bar;
  eq.neighborhood_radius = radius;

  // lambda_i is linear in phi, so its extremes over the sup-norm ball sit on
  // the corners; |lambda_1| and lambda_2 are smallest at c_bar - s r.
  double min_abs = std::numeric_limits<double>::infinity();
  for (double s1 : {-1.0, 1.0}) {
    for (double s2 : {-1.0, 1.0}) {
      const FamilyPair lam = eq.speeds(s1 * radius, s2 * radius);
      if (!(lam.first < 0.0 && lam.second > 0.0) || -lam.first < eq.sonic_margin() ||
          lam.second < eq.sonic_margin()) {
        std::ostringstream os;
        os << "make_equilibrium: radius " << radius
           << " reaches a sonic state (largest admissible radius is "
           << eq.c_bar / speed_sensitivity(gamma) << ")";
        throw DomainError(os.str());
      }
      min_abs = std::min({min_abs, -lam.first, lam.second});
    }
  }
  eq.A0 = 1.0 / min_abs;
  return eq;
}

// ---------------------------------------------------------------------------
// DampingField

namespace {

double poly_bound(const std::vector<double>& p, double length) {
  double b = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) b += std::abs(p[j]) * std::pow(length, double(j));
  return b;
}

double poly_derivative_bound(const std::vector<double>& p, double length) {
  double b = 0.0;
  for (std::size_t j = 1; j < p.size(); ++j)
    b += double(j) * std::abs(p[j]) * std::pow(length, double(j - 1));
  return b;
}

double signal_sup_bound(const PeriodicSignal& s) {
  if (s.kind() == PeriodicSignal::Kind::power_sine) return std::abs(s.amplitude());
  double b = std::abs(s.mean());
  for (double c : s.cos_coeffs()) b += std::abs(c);
  for (double c : s.sin_coeffs()) b += std::abs(c);
  return b;
}

double signal_derivative_bound(const PeriodicSignal& s) {
  const double w = 2.0 * M_PI / s.period();
  if (s.kind() == PeriodicSignal::Kind::power_sine)
    return std::abs(s.amplitude()) * s.exponent() * w;
  double b = 0.0;
  for (std::size_t k = 0; k < s.cos_coeffs().size(); ++k) b += std::abs(s.cos_coeffs()[k]) * (k + 1) * w;
  for (std::size_t k = 0; k < s.sin_coeffs().size(); ++k) b += std::abs(s.sin_coeffs()[k]) * (k + 1) * w;
  return b;
}

} // namespace

DampingField DampingField::constant(double beta0, double period, double length) {
  if (!(period > 0.0) || !(length > 0.0))
    throw DomainError("DampingField: period and length must be positive");
  DampingField f;
  f.kind_ = Kind::constant;
  f.beta0_ = beta0;
  f.period_ = period;
  f.length_ = length;
  f.beta_star_ = std::min(beta0, 0.0);
  f.deriv_bound_ = 0.0;
  return f;
}

DampingField DampingField::separable(double beta0, PeriodicSignal temporal,
                                     std::vector<double> spatial_poly, double length) {
  if (!(length > 0.0)) throw DomainError("DampingField: length must be positive");
  if (spatial_poly.empty()) spatial_poly = {1.0};
  DampingField f;
  f.kind_ = Kind::separable_periodic;
  f.beta0_ = beta0;
  f.period_ = temporal.period();
  f.length_ = length;
  const double tb = signal_sup_bound(temporal);
  const double tdb = signal_derivative_bound(temporal);
  const double sb = poly_bound(spatial_poly, length);
  const double sdb = poly_derivative_bound(spatial_poly, length);
  f.beta_star_ = -std::abs(beta0) * tb * sb;
  f.deriv_bound_ = std::abs(beta0) * std::max(tdb * sb, tb * sdb);
  f.temporal_ = std::move(temporal);
  f.spatial_ = std::move(spatial_poly);
  return f;
}

DampingField DampingField::tabulated(std::vector<double> values, int nt, int nx, double period,
                                     double length) {
  if (nt < 4 || nx < 4) throw DomainError("DampingField: table needs at least 4x4 samples");
  if (values.size() != static_cast<std::size_t>(nt) * static_cast<std::size_t>(nx))
    throw DomainError("DampingField: table size does not match nt * nx");
  if (!(period > 0.0) || !(length > 0.0))
    throw DomainError("DampingField: period and length must be positive");
  DampingField f;
  f.kind_ = Kind::tabulated;
  f.period_ = period;
  f.length_ = length;
  f.table_nt_ = nt;
  f.table_nx_ = nx;
  f.table_ = std::move(values);
  double max_abs = 0.0;
  for (double v : f.table_) max_abs = std::max(max_abs, std::abs(v));
  f.beta0_ = *std::min_element(f.table_.begin(), f.table_.end());
  // Lebesgue constant of 4-point Lagrange interpolation is 1.25 per axis.
  f.beta_star_ = -1.5625 * max_abs;
  // Derivative bound from the interpolant itself on a 16x refined grid, plus
  // a 10% margin for the unsampled gaps.
  double db = 0.0;
  const int rt = 16 * nt;
  const int rx = 16 * (nx - 1) + 1;
  for (int j = 0; j < rt; ++j) {
    const double t = period * j / rt;
    for (int k = 0; k < rx; ++k) {
      const double x = length * k / (rx - 1);
      db = std::max({db, std::abs(f.table_eval(t, x, 1, 0)), std::abs(f.table_eval(t, x, 0, 1))});
    }
  }
  f.deriv_bound_ = 1.1 * db;
  return f;
}

DampingField DampingField::with_bounds(double beta_star, double deriv_bound) const {
  DampingField f = *this;
  f.beta_star_ = beta_star;
  f.deriv_bound_ = deriv_bound;
  return f;
}

DampingField DampingField::mirrored() const {
  DampingField f = *this;
  f.mirrored_ = !mirrored_;
  return f;
}

double DampingField::spatial_value(double x) const {
  double v = 0.0;
  for (std::size_t j = spatial_.size(); j-- > 0;) v = v * x + spatial_[j];
  return v;
}

double DampingField::spatial_derivative(double x) const {
  double v = 0.0;
  for (std::size_t j = spatial_.size(); j-- > 1;) v = v * x + double(j) * spatial_[j];
  return v;
}

double DampingField::table_eval(double t, double x, int dt_order, int dx_order) const {
  const double ht = period_ / table_nt_;
  const double hx = length_ / (table_nx_ - 1);
  const auto lt = interp::locate_periodic(t, ht, table_nt_);
  const auto lx = interp::locate_clamped(x, hx, table_nx_);
  const auto wt = dt_order ? interp::lagrange4_derivative(lt.frac) : interp::lagrange4(lt.frac);
  const auto wx = dx_order ? interp::lagrange4_derivative(lx.frac) : interp::lagrange4(lx.frac);
  double v = 0.0;
  for (int a = 0; a < 4; ++a) {
    const int j = interp::wrap_index(lt.base - 1 + a, table_nt_);
    const double* row = table_.data() + static_cast<std::size_t>(j) * table_nx_;
    double r = 0.0;
    for (int b = 0; b < 4; ++b) r += wx[b] * row[lx.base - 1 + b];
    v += wt[a] * r;
  }
  if (dt_order) v /= ht;
  if (dx_order) v /= hx;
  return v;
}

double DampingField::value(double t, double x) const {
  if (mirrored_) x = length_ - x;
  switch (kind_) {
  case Kind::constant:
    return beta0_;
  case Kind::separable_periodic:
    return beta0_ * temporal_.value(t) * spatial_value(x);
  case Kind::tabulated:
    return table_eval(t, x, 0, 0);
  }
  return 0.0;
}

double DampingField::dt(double t, double x) const {
  if (mirrored_) x = length_ - x;
  switch (kind_) {
  case Kind::constant:
    return 0.0;
  case Kind::separable_periodic:
    return beta0_ * temporal_.derivative(t) * spatial_value(x);
  case Kind::tabulated:
    return table_eval(t, x, 1, 0);
  }
  return 0.0;
}

double DampingField::dx(double t, double x) const {
  const double sign = mirrored_ ? -1.0 : 1.0;
  if (mirrored_) x = length_ - x;
  switch (kind_) {
  case Kind::constant:
    return 0.0;
  case Kind::separable_periodic:
    return sign * beta0_ * temporal_.value(t) * spatial_derivative(x);
  case Kind::tabulated:
    return sign * table_eval(t, x, 0, 1);
  }
  return 0.0;
}

bool DampingField::is_zero() const {
  switch (kind_) {
  case Kind::constant:
    return beta0_ == 0.0;
  case Kind::separable_periodic:
    return beta0_ == 0.0 || temporal_.is_zero();
  case Kind::tabulated:
    return std::all_of(table_.begin(), table_.end(), [](double v) { return v == 0.0; });
  }
  return false;
}

bool DampingField::is_time_independent() const {
  switch (kind_) {
  case Kind::constant:
    return true;
  case Kind::separable_periodic:
    return beta0_ == 0.0 ||
           (temporal_.kind() == PeriodicSignal::Kind::fourier &&
            std::all_of(temporal_.cos_coeffs().begin(), temporal_.cos_coeffs().end(),
                        [](double c) { return c == 0.0; }) &&
            std::all_of(temporal_.sin_coeffs().begin(), temporal_.sin_coeffs().end(),
                        [](double c) { return c == 0.0; }));
  case Kind::tabulated:
    for (int j = 1; j < table_nt_; ++j)
      for (int k = 0; k < table_nx_; ++k)
        if (table_[static_cast<std::size_t>(j) * table_nx_ + k] != table_[k]) return false;
    return true;
  }
  return false;
}

HypothesisReport validate_hypothesis(const DampingField& field, int nt, int nx) {
  if (nt < 2 || nx < 2) throw DomainError("validate_hypothesis: grid density must be >= 2");
  HypothesisReport rep;
  rep.max_beta = -std::numeric_limits<double>::infinity();
  rep.min_beta = std::numeric_limits<double>::infinity();
  const double T = field.period();
  const double L = field.length();
  const double ht = 1e-5 * T;
  const double hx = 1e-5 * L;
  for (int j = 0; j < nt; ++j) {
    const double t = T * j / nt;
    for (int k = 0; k < nx; ++k) {
      const double x = L * k / (nx - 1);
      const double b = field.value(t, x);
      rep.max_beta = std::max(rep.max_beta, b);
      rep.min_beta = std::min(rep.min_beta, b);
      const double dtb = (field.value(t + ht, x) - field.value(t - ht, x)) / (2.0 * ht);
      const double xl = std::max(0.0, x - hx);
      const double xr = std::min(L, x + hx);
      const double dxb = (field.value(t, xr) - field.value(t, xl)) / (xr - xl);
      rep.max_abs_dt = std::max(rep.max_abs_dt, std::abs(dtb));
      rep.max_abs_dx = std::max(rep.max_abs_dx, std::abs(dxb));
      rep.periodicity_defect =
          std::max(rep.periodicity_defect, std::abs(field.value(t + T, x) - b));
    }
  }
  const double scale = std::max(1.0, std::abs(rep.min_beta));
  if (rep.max_beta > 0.0) {
    std::ostringstream os;
    os << "damping coefficient must be non-positive: sampled max beta = " << rep.max_beta;
    rep.violations.push_back(os.str());
  }
  if (rep.min_beta < field.beta_star() - 1e-12 * scale) {
    std::ostringstream os;
    os << "sampled beta " << rep.min_beta << " falls below beta_star " << field.beta_star();
    rep.violations.push_back(os.str());
  }
  const double slack = 1e-6 * (1.0 + field.deriv_bound());
  if (rep.max_abs_dt > field.deriv_bound() + slack || rep.max_abs_dx > field.deriv_bound() + slack) {
    std::ostringstream os;
    os << "derivative bound " << field.deriv_bound() << " exceeded: |dt beta| = " << rep.max_abs_dt
       << ", |dx beta| = " << rep.max_abs_dx;
    rep.violations.push_back(os.str());
  }
  if (rep.periodicity_defect > 1e-12 * scale) {
    std::ostringstream os;
    os << "damping is not periodic in t: defect " << rep.periodicity_defect;
    rep.violations.push_back(os.str());
  }
  rep.passed = rep.violations.empty();
  return rep;
}

BoundaryForcing make_forcing(PeriodicSignal phi1b, PeriodicSignal phi2b, double kappa1,
                             double kappa2) {
  if (!(std::abs(kappa1) < 1.0)) throw DomainError("reflection coefficient needs |kappa1| < 1");
  if (!(std::abs(kappa2) < 1.0)) throw DomainError("reflection coefficient needs |kappa2| < 1");
  if (phi1b.period() != phi2b.period())
    throw DomainError("boundary forcings must share one period");
  BoundaryForcing f;
  f.period = phi1b.period();
  f.phi1b = std::move(phi1b);
  f.phi2b = std::move(phi2b);
  f.kappa1 = kappa1;
  f.kappa2 = kappa2;
  f.eps_measured = boundary_c1_norm(f, 4096).sampled;
  return f;
}

C1Norm boundary_c1_norm(const BoundaryForcing& forcing, int samples) {
  if (samples < 64) throw DomainError("boundary_c1_norm: need at least 64 samples");
  C1Norm out;
  for (const PeriodicSignal* s : {&forcing.phi1b, &forcing.phi2b}) {
    for (int i = 0; i < samples; ++i) {
      const double t = s->period() * i / samples;
      out.sampled = std::max({out.sampled, std::abs(s->value(t)), std::abs(s->derivative(t))});
    }
    out.certified = std::max(out.certified, s->certified_c1_bound());
  }
  return out;
}

} // namespace pe
