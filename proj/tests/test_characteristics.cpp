#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pe/characteristics.hpp"
#include "pe/errors.hpp"

using namespace pe;
using doctest::Approx;

namespace {

const double kT = 4.0;
const double kL = 1.0;

Equilibrium gas() { return make_equilibrium(1.0, 1.4, default_neighborhood_radius(1.0, 1.4)); }

PeriodicField sampled(int nt, int nx, double (*f1)(double, double), double (*f2)(double, double)) {
  PeriodicField f(nt, nx, kT, kL);
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < nx; ++k) {
      f(0, j, k) = f1(f.t(j), f.x(k));
      f(1, j, k) = f2(f.t(j), f.x(k));
    }
  return f;
}

double zero_fn(double, double) { return 0.0; }
double sin_t(double t, double) { return std::sin(2.0 * M_PI * t / kT); }
double wave1(double t, double x) { return 0.05 * std::sin(2.0 * M_PI * t / kT + x); }
double wave2(double t, double x) { return 0.04 * std::cos(2.0 * M_PI * t / kT - 2.0 * x); }
double ramp(double, double x) { return 0.08 * x; }

} // namespace

TEST_CASE("interpolation reproduces nodes and constants") {
  const PeriodicField f = sampled(16, 9, wave1, wave2);
  for (int j = 0; j < 16; j += 3)
    for (int k = 0; k < 9; k += 2) {
      CHECK(interpolate(f, 0, f.t(j), f.x(k)) == f(0, j, k));
      CHECK(interpolate(f, 1, f.t(j) + kT, f.x(k), 1) == Approx(f(1, j, k)).epsilon(1e-14));
    }
  PeriodicField c(8, 5, kT, kL);
  for (int comp = 0; comp < 2; ++comp)
    for (auto& v : c.component(comp)) v = 0.75;
  for (double t : {-3.3, 0.1, 2.9, 17.0})
    for (double x : {0.0, 0.37, 1.0}) CHECK(interpolate(c, 0, t, x) == Approx(0.75).epsilon(1e-14));
  CHECK_THROWS_AS(interpolate(c, 0, 0.0, 1.01), DomainError);
  CHECK_THROWS_AS(interpolate(c, 0, 0.0, -0.01), DomainError);
  CHECK_NOTHROW(interpolate(c, 0, 0.0, 1.0 + 1e-14));
}

TEST_CASE("cubic interpolation converges at fourth order in t") {
  double prev = 0.0;
  for (int nt : {16, 32, 64}) {
    const PeriodicField f = sampled(nt, 5, sin_t, zero_fn);
    double err = 0.0;
    for (int i = 0; i < 997; ++i) {
      const double t = kT * (i + 0.37) / 997.0;
      err = std::max(err, std::abs(interpolate(f, 0, t, 0.3) - sin_t(t, 0.0)));
    }
    if (prev > 0.0) CHECK(prev / err == Approx(16.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("zero field traces straight lines") {
  const Equilibrium eq = gas();
  const PeriodicField f(32, 17, kT, kL);
  const CharPath p1 = trace(f, eq, 1, {1.2, 0.0});
  CHECK(p1.nodes.size() == 17);
  CHECK(p1.arrival_t == Approx(1.2 - kL / eq.c_bar).epsilon(1e-12));
  for (const auto& n : p1.nodes) CHECK(std::abs(n.t - (1.2 - n.x / eq.c_bar)) < 1e-12);
  const CharPath p2 = trace(f, eq, 2, {0.4, 0.75});
  CHECK(p2.arrival_t == Approx(0.4 - 0.75 / eq.c_bar).epsilon(1e-12));
  CHECK(p2.nodes.back().x == 0.0);
  for (std::size_t i = 1; i < p2.nodes.size(); ++i) CHECK(p2.nodes[i].x < p2.nodes[i - 1].x);
  TraceOptions bad;
  bad.substeps_per_cell = 0;
  CHECK_THROWS_AS(trace(f, eq, 1, {0.0, 0.5}, bad), DomainError);
}

TEST_CASE("trace matches closed form for a field linear in x") {
  // phi1 = a x, phi2 = 0: dt/dx = 1 / (-c + (gamma+1)/2 a x), solved by a log.
  const Equilibrium eq = gas();
  const PeriodicField f = sampled(16, 11, ramp, zero_fn);
  const double A = -eq.c_bar;
  const double B = 0.5 * (eq.gamma + 1.0) * 0.08;
  const double exact = 0.3 + std::log((A + B * kL) / A) / B;
  double prev = 0.0;
  for (int sub : {1, 2, 4}) {
    TraceOptions o;
    o.substeps_per_cell = sub;
    const double err = std::abs(trace(f, eq, 1, {0.3, 0.0}, o).arrival_t - exact);
    if (prev > 0.0) CHECK(prev / err >= 8.0);
    prev = err;
  }
  CHECK(prev < 1e-10);
}

TEST_CASE("trace self-convergence and reversibility on a travelling wave") {
  const Equilibrium eq = gas();
  const PeriodicField f = sampled(64, 33, wave1, wave2);
  TraceOptions ref;
  ref.substeps_per_cell = 400;
  const double t_ref = trace(f, eq, 1, {0.7, 0.1}, ref).arrival_t;
  const double t_def = trace(f, eq, 1, {0.7, 0.1}).arrival_t;
  CHECK(std::abs(t_def - t_ref) <= 1e-8);

  const CharPath fwd = trace(f, eq, 1, {0.7, 0.1});
  const CharPath back = trace_to(f, eq, 1, {fwd.arrival_t, kL}, 0.1);
  CHECK(std::abs(back.arrival_t - 0.7) <= 1e-9);
  const CharPath f2 = trace(f, eq, 2, {2.1, 0.9});
  const CharPath b2 = trace_to(f, eq, 2, {f2.arrival_t, 0.0}, 0.9);
  CHECK(std::abs(b2.arrival_t - 2.1) <= 1e-9);
}

TEST_CASE("trace reports inadmissible states") {
  const Equilibrium eq = gas();
  PeriodicField f(8, 5, kT, kL);
  for (auto& v : f.component(0)) v = 0.5;
  CHECK_THROWS_AS(trace(f, eq, 1, {0.0, 0.0}), AdmissibilityError);
}

TEST_CASE("weights F1 and F2") {
  const Equilibrium eq = gas();
  const DampingField none = DampingField::constant(0.0, kT, kL);
  CHECK(weight_F(none, eq, 1, 0.3, 0.2, 33) == 1.0);
  CHECK(weight_F(none, eq, 2, 0.3, 0.2, 33) == 1.0);
  const DampingField one = DampingField::constant(-1.0, kT, kL);
  CHECK(weight_F(one, eq, 1, 0.0, 0.0, 33) == Approx(std::exp(0.5 / std::sqrt(1.4))).epsilon(1e-12));
  CHECK(weight_F(one, eq, 1, 0.0, 0.0, 33) == Approx(1.5260).epsilon(1e-4));
  CHECK(weight_F(one, eq, 1, 0.0, kL, 33) == 1.0);
  CHECK(weight_F(one, eq, 2, 0.0, 0.0, 33) == 1.0);
  CHECK(weight_F(one, eq, 2, 0.0, kL, 33) == Approx(std::exp(0.5 / std::sqrt(1.4))).epsilon(1e-12));
  CHECK_THROWS_AS(weight_F(one, eq, 1, 0.0, 0.0, 1), DomainError);
}

TEST_CASE("weight bounds, monotonicity and table consistency") {
  const Equilibrium eq = gas();
  const auto temporal = PeriodicSignal::fourier(kT, 1.0, {0.3}, {0.2});
  const DampingField b = DampingField::separable(-0.7, temporal, {1.0, -0.4}, kL);
  const double M0 = weight_bound(b, eq);
  CHECK(M0 == Approx(std::exp(-0.5 * b.beta_star() * eq.A0 * kL)));
  const int nt = 32, nx = 33;
  const WeightTable table(b, eq, nt, nx, kT, kL);
  for (int j = 0; j < nt; ++j) {
    const double t = kT * j / nt;
    for (int k = 0; k < nx; ++k) {
      const double x = kL * k / (nx - 1);
      const double f1 = weight_F(b, eq, 1, t, x, 2 * nx + 1);
      const double f2 = weight_F(b, eq, 2, t, x, 2 * nx + 1);
      CHECK(f1 >= 1.0 - 1e-14);
      CHECK(f2 >= 1.0 - 1e-14);
      CHECK(f1 <= M0);
      CHECK(f2 <= M0);
      CHECK(table.F(1, j, k) == Approx(f1).epsilon(1e-9));
      CHECK(table.F(2, j, k) == Approx(f2).epsilon(1e-9));
      if (k > 0) {
        CHECK(table.F(1, j, k) <= table.F(1, j, k - 1));
        CHECK(table.F(2, j, k) >= table.F(2, j, k - 1));
      }
    }
  }
  // D1 = int_x^L dt beta / 2 nu_1(Phi) against a fine quadrature
  const double t = 1.3;
  const int n = 2000;
  double d1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = kL * (i + 0.5) / n;
    d1 += b.dt(t, x) * 0.5 * (-1.0 / eq.c_bar) * kL / n;
  }
  CHECK(table.D_at(1, t, 0) == Approx(d1).epsilon(1e-5));
  CHECK(table.F_at(1, t, 0) == Approx(weight_F(b, eq, 1, t, 0.0, 401)).epsilon(1e-5));
}

TEST_CASE("path integration") {
  const Equilibrium eq = gas();
  const PeriodicField f(16, 11, kT, kL);
  const CharPath p = trace(f, eq, 1, {0.5, 0.3});
  CHECK(path_integrate(p, [](double, double) { return 0.0; }) == 0.0);
  CHECK(path_integrate(p, [](double, double) { return 1.0; }) == Approx(kL - 0.3).epsilon(1e-14));
  const CharPath q = trace(f, eq, 1, {0.5, 0.0});
  CHECK(path_integrate(q, [](double, double y) { return y; }) == Approx(0.5).epsilon(1e-12));
}
