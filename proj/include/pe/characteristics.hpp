#pragma once

#include <functional>
#include <vector>

#include "pe/model.hpp"

namespace pe {

/// Grid-sampled perturbation pair (phi1, phi2) on [0, period) x [0, length].
/// t_j = j * period / nt (periodic, index arithmetic mod nt) and
/// x_k = k * length / (nx - 1). Component 0 is phi1, component 1 is phi2.
class PeriodicField {
public:
  PeriodicField() = default;
  PeriodicField(int nt, int nx, double period, double length);

  [[nodiscard]] int nt() const { return nt_; }
  [[nodiscard]] int nx() const { return nx_; }
  [[nodiscard]] double period() const { return period_; }
  [[nodiscard]] double length() const { return length_; }
  [[nodiscard]] double ht() const { return period_ / nt_; }
  [[nodiscard]] double hx() const { return length_ / (nx_ - 1); }
  [[nodiscard]] double t(int j) const { return period_ * j / nt_; }
  [[nodiscard]] double x(int k) const { return length_ * k / (nx_ - 1); }

  [[nodiscard]] double operator()(int comp, int j, int k) const {
    return data_[comp][static_cast<std::size_t>(j) * nx_ + k];
  }
  double& operator()(int comp, int j, int k) {
    return data_[comp][static_cast<std::size_t>(j) * nx_ + k];
  }
  [[nodiscard]] const std::vector<double>& component(int comp) const { return data_[comp]; }
  std::vector<double>& component(int comp) { return data_[comp]; }

  [[nodiscard]] double sup_norm() const;
  /// Sup over all nodes and both components of |this - other|.
  [[nodiscard]] double sup_diff(const PeriodicField& other) const;
  [[nodiscard]] bool same_grid(const PeriodicField& other) const;

private:
  int nt_ = 0;
  int nx_ = 0;
  double period_ = 1.0;
  double length_ = 1.0;
  std::vector<double> data_[2];
};

/// Periodic interpolation in t (order 1: linear, order 3: four-point cubic)
/// combined with linear interpolation in x. Exact at grid nodes.
double interpolate(const PeriodicField& field, int component, double t, double x, int order = 3);

/// Interpolation in t along grid column k (no x interpolation).
double interpolate_column(const PeriodicField& field, int component, int k, double t,
                          int order = 3);

/// Periodic interpolation of a uniformly sampled signal (n samples, spacing h,
/// element stride `stride`).
double interpolate_periodic(const double* samples, int n, int stride, double h, double t,
                            int order);

struct PathNode {
  double t = 0.0;
  double x = 0.0;
};

/// A traced characteristic: nodes from the anchor to the end face, stored at
/// grid-column resolution. `t` is not wrapped into [0, period).
struct CharPath {
  int family = 1;
  std::vector<PathNode> nodes;
  double arrival_t = 0.0;
};

struct TraceOptions {
  int substeps_per_cell = 4;
  int interpolation_order = 3;
  /// Use nu_i(Phi) instead of nu_i(phi + Phi) (straight characteristics).
  bool frozen = false;
};

/// Integrates dt/dx = nu_family(phi(t, x) + Phi) with classical RK4 from the
/// anchor to the family's boundary face (x = L for family 1, x = 0 for 2).
CharPath trace(const PeriodicField& field, const Equilibrium& eq, int family, PathNode anchor,
               const TraceOptions& opts = {});

/// As trace(), but ends at an arbitrary x_end in [0, L].
CharPath trace_to(const PeriodicField& field, const Equilibrium& eq, int family, PathNode anchor,
                  double x_end, const TraceOptions& opts = {});

/// Time at x_end of the characteristic through (t0, x_start), using `substeps`
/// RK4 steps. x_start and x_end must lie in the same grid cell.
double advance_in_cell(const PeriodicField& field, const Equilibrium& eq, int family, double t0,
                       double x_start, double x_end, int substeps, const TraceOptions& opts);

/// Integrating-factor weights
///   F1(t, x) = exp( int_x^L beta(t, s)/2 nu_1(Phi) ds )
///   F2(t, x) = exp(-int_0^x beta(t, s)/2 nu_2(Phi) ds )
/// by composite Simpson quadrature with quad_points points.
double weight_F(const DampingField& damping, const Equilibrium& eq, int family, double t, double x,
                int quad_points);

/// Upper bound M0 = exp(-beta_star A0 L / 2) on both weights.
double weight_bound(const DampingField& damping, const Equilibrium& eq);

/// Trapezoid rule over the path nodes in the x parameterisation, oriented
/// from the anchor to the end node.
double path_integrate(const CharPath& path, const std::function<double(double, double)>& integrand);

/// Tabulated weight exponents and time-derivative integrals on a grid, for
/// fast evaluation along many characteristics:
///   log F_family(t_j, x_k)  and
///   D1(t_j, x_k) = int_{x_k}^L dt beta / 2 nu_1(Phi) ds,
///   D2(t_j, x_k) = int_0^{x_k} dt beta / 2 nu_2(Phi) ds.
/// Cell integrals use Simpson's rule on the grid nodes plus cell midpoints.
class WeightTable {
public:
  WeightTable(const DampingField& damping, const Equilibrium& eq, int nt, int nx, double period,
              double length);

  [[nodiscard]] double F(int family, int j, int k) const;
  [[nodiscard]] double D(int family, int j, int k) const;
  /// Off-grid t, interpolated in t (cubic, periodic).
  [[nodiscard]] double F_at(int family, double t, int k) const;
  [[nodiscard]] double D_at(int family, double t, int k) const;

private:
  int nt_;
  int nx_;
  double ht_;
  std::vector<double> logF_[2];
  std::vector<double> D_[2];
  bool time_independent_;
};

} // namespace pe
