#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pe/errors.hpp"
#include "pe/model.hpp"

using namespace pe;
using doctest::Approx;

TEST_CASE("sound speed matches hand values") {
  CHECK(sound_speed(1.0, 3.0) == Approx(1.7320508).epsilon(1e-7));
  CHECK(sound_speed(1.0, 1.4) == Approx(1.1832160).epsilon(1e-7));
  CHECK(sound_speed(1.0, 1.0 + 1e-12) == Approx(1.0).epsilon(1e-9));
  CHECK(sound_speed(2.0, 1.4) == Approx(std::sqrt(1.4) * std::pow(2.0, 0.2)));
  CHECK_THROWS_AS(sound_speed(0.0, 1.4), DomainError);
  CHECK_THROWS_AS(sound_speed(-1.0, 1.4), DomainError);
  CHECK_THROWS_AS(sound_speed(1.0, 1.0), DomainError);
}

TEST_CASE("Riemann invariants at rest") {
  const RiemannPair a = riemann_from_state({1.0, 0.0}, 3.0);
  CHECK(a.m == Approx(-0.8660254).epsilon(1e-7));
  CHECK(a.n == Approx(0.8660254).epsilon(1e-7));
  const RiemannPair b = riemann_from_state({1.0, 0.0}, 1.4);
  CHECK(b.m == Approx(-2.9580399).epsilon(1e-7));
  CHECK(b.n == Approx(2.9580399).epsilon(1e-7));
  CHECK_THROWS_AS(riemann_from_state({0.0, 0.0}, 1.4), DomainError);
}

TEST_CASE("inverse transform") {
  const GasState s = state_from_riemann({-std::sqrt(3.0) / 2, std::sqrt(3.0) / 2}, 3.0);
  CHECK(s.rho == Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(s.u) < 1e-15);
  const GasState t = state_from_riemann({-2.9580399, 2.9580399}, 1.4);
  CHECK(t.rho == Approx(1.0).epsilon(1e-7));
  CHECK_THROWS_AS(state_from_riemann({0.3, 0.3}, 1.4), DomainError);
  CHECK_THROWS_AS(state_from_riemann({0.5, 0.3}, 1.4), DomainError);
}

TEST_CASE("round trip over random admissible states") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rho(0.2, 5.0), gam(1.05, 3.0), mach(-0.9, 0.9);
  for (int i = 0; i < 1000; ++i) {
    const double g = gam(rng);
    const double r = rho(rng);
    const GasState s{r, mach(rng) * sound_speed(r, g)};
    const GasState back = state_from_riemann(riemann_from_state(s, g), g);
    CHECK(std::abs(back.rho - s.rho) <= 1e-13 * s.rho);
    CHECK(std::abs(back.u - s.u) <= 1e-13 * std::max(1.0, std::abs(s.u)));
  }
}

TEST_CASE("eigenvalues") {
  const FamilyPair l = eigenvalues({-0.8660254, 0.8660254}, 3.0);
  CHECK(l.first == Approx(-1.7320508).epsilon(1e-7));
  CHECK(l.second == Approx(1.7320508).epsilon(1e-7));
  const Equilibrium eq = make_equilibrium(1.0, 1.4, 0.0);
  const FamilyPair p = eigenvalues({eq.m_bar, eq.n_bar}, 1.4);
  CHECK(p.first == Approx(-1.1832160).epsilon(1e-7));
  CHECK(p.second == Approx(1.1832160).epsilon(1e-7));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0), g(1.05, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double m = u(rng);
    const double n = m + std::abs(u(rng)) + 1e-3;
    const double gamma = g(rng);
    const FamilyPair e = eigenvalues({m, n}, gamma);
    CHECK(e.first + e.second == Approx(2.0 * (m + n)).epsilon(1e-12));
    CHECK(e.second - e.first == Approx((gamma - 1.0) * (n - m)).epsilon(1e-12));
    CHECK(e.first < e.second);
    const FamilyPair e3 = eigenvalues({m, n}, 3.0);
    CHECK(e3.first == 2.0 * m);
    CHECK(e3.second == 2.0 * n);
  }
}

TEST_CASE("nu and admissibility") {
  const FamilyPair v = nu({-0.8660254, 0.8660254}, 3.0);
  CHECK(v.first == Approx(-0.5773503).epsilon(1e-6));
  CHECK(v.second == Approx(0.5773503).epsilon(1e-6));
  const Equilibrium eq = make_equilibrium(1.0, 1.4, 0.1);
  const FamilyPair f = eq.inverse_speeds(0.0, 0.0);
  CHECK(f.first == Approx(-1.0 / eq.c_bar));
  CHECK(f.first == Approx(eq.frozen_inverse_speeds().first));
  // lambda_1 = 0 for gamma = 3 when m = 0
  CHECK_THROWS_AS(nu({0.0, 1.0}, 3.0), AdmissibilityError);
  CHECK_THROWS_AS(nu({0.5, 1.0}, 3.0), AdmissibilityError);
  CHECK_THROWS_AS((void)eq.inverse_speeds(0.2, 0.0), AdmissibilityError);
}

TEST_CASE("equilibrium construction") {
  const Equilibrium eq = make_equilibrium(1.0, 1.4, 0.1);
  CHECK(eq.c_bar == Approx(1.1832160).epsilon(1e-7));
  CHECK(eq.n_bar == Approx(2.9580399).epsilon(1e-7));
  CHECK(eq.m_bar == -eq.n_bar);
  CHECK(eq.A0 == Approx(1.0 / (1.1832160 - 0.2)).epsilon(1e-6));
  CHECK(make_equilibrium(1.0, 1.4, 0.0).A0 == Approx(1.0 / eq.c_bar));
  // first sonic radius is c_bar / s with s = (gamma+1)/2 + |3-gamma|/2 = 2
  CHECK_THROWS_AS(make_equilibrium(1.0, 1.4, eq.c_bar / 2.0), DomainError);
  CHECK_NOTHROW(make_equilibrium(1.0, 1.4, 0.99 * eq.c_bar / 2.0));
  CHECK_THROWS_AS(make_equilibrium(1.0, 1.4, -0.1), DomainError);
  CHECK(default_neighborhood_radius(1.0, 1.4) == Approx(0.1 * eq.c_bar));
}

TEST_CASE("nu magnitudes bounded by A0 over the ball") {
  const Equilibrium eq = make_equilibrium(1.3, 1.4, 0.15);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-0.15, 0.15);
  for (int i = 0; i < 2000; ++i) {
    const FamilyPair v = eq.inverse_speeds(d(rng), d(rng));
    CHECK(std::abs(v.first) <= eq.A0 * (1.0 + 1e-14));
    CHECK(std::abs(v.second) <= eq.A0 * (1.0 + 1e-14));
  }
}

TEST_CASE("damping hypothesis validation") {
  const double T = 4.0;
  const HypothesisReport c = validate_hypothesis(DampingField::constant(-0.5, T, 1.0), 32, 32);
  CHECK(c.passed);
  CHECK(c.max_abs_dt == 0.0);
  CHECK(c.max_abs_dx == 0.0);

  const HypothesisReport pos = validate_hypothesis(DampingField::constant(0.1, T, 1.0), 8, 8);
  CHECK_FALSE(pos.passed);
  REQUIRE_FALSE(pos.violations.empty());
  CHECK(pos.violations[0].find("non-positive") != std::string::npos);

  const auto temporal = PeriodicSignal::fourier(T, 1.0, {}, {0.5});
  const DampingField sep = DampingField::separable(-0.5, temporal, {1.0}, 1.0);
  const HypothesisReport s = validate_hypothesis(sep, 64, 16);
  CHECK(s.passed);
  const double bound = 0.25 * 2.0 * M_PI / T;
  CHECK(s.max_abs_dt <= bound + 1e-6);
  CHECK(s.max_abs_dt == Approx(bound).epsilon(1e-3));
  CHECK(sep.beta_star() <= -0.75 + 1e-12);

  // bounds that are too tight are reported, not thrown
  const HypothesisReport tight = validate_hypothesis(sep.with_bounds(-0.5, 0.1), 64, 16);
  CHECK_FALSE(tight.passed);
  CHECK(tight.violations.size() == 2);
}

TEST_CASE("damping periodicity and mirror") {
  const double T = 2.0;
  const auto temporal = PeriodicSignal::fourier(T, 1.0, {0.2, 0.1}, {0.3});
  const DampingField f = DampingField::separable(-0.4, temporal, {1.0, 0.5, -0.2}, 1.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> tt(-10.0, 10.0), xx(0.0, 1.5);
  for (int i = 0; i < 500; ++i) {
    const double t = tt(rng);
    const double x = xx(rng);
    CHECK(std::abs(f.value(t + T, x) - f.value(t, x)) <= 1e-15);
    CHECK(f.mirrored().value(t, 1.5 - x) == Approx(f.value(t, x)).epsilon(1e-14));
  }
}

TEST_CASE("tabulated damping interpolates its table") {
  const int nt = 16, nx = 9;
  std::vector<double> v(nt * nx);
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < nx; ++k) v[j * nx + k] = -0.5 - 0.1 * std::sin(2 * M_PI * j / nt) * k / 8.0;
  const DampingField f = DampingField::tabulated(v, nt, nx, 4.0, 1.0);
  CHECK(f.value(4.0 * 3 / nt, 0.5) == Approx(v[3 * nx + 4]).epsilon(1e-14));
  CHECK(validate_hypothesis(f, 32, 32).passed);
  CHECK_FALSE(f.is_time_independent());
}

TEST_CASE("boundary forcing and C1 norm") {
  const double T = 2.0 * M_PI;
  const auto zero = make_forcing(PeriodicSignal::zero(T), PeriodicSignal::zero(T), 0.0, 0.0);
  CHECK(boundary_c1_norm(zero, 64).sampled == 0.0);
  CHECK(boundary_c1_norm(zero, 64).certified == 0.0);

  const double eps = 0.02;
  const auto f = make_forcing(PeriodicSignal::sine(T, eps), PeriodicSignal::zero(T), 0.3, -0.2);
  const C1Norm n = boundary_c1_norm(f, 1024);
  CHECK(n.sampled == Approx(eps).epsilon(1e-9));
  CHECK(n.certified >= n.sampled);
  CHECK(f.eps_measured == Approx(eps).epsilon(1e-6));

  CHECK_THROWS_AS(make_forcing(PeriodicSignal::zero(T), PeriodicSignal::zero(T), 1.0, 0.0),
                  DomainError);
  CHECK_THROWS_AS(make_forcing(PeriodicSignal::zero(T), PeriodicSignal::zero(T), 0.0, -1.2),
                  DomainError);
  CHECK_THROWS_AS(make_forcing(PeriodicSignal::zero(T), PeriodicSignal::zero(2.0), 0.0, 0.0),
                  DomainError);
  CHECK_THROWS_AS(boundary_c1_norm(f, 32), DomainError);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const auto g = make_forcing(PeriodicSignal::fourier(3.0, c(rng), {c(rng), c(rng)}, {c(rng)}),
                                PeriodicSignal::fourier(3.0, 0.0, {}, {c(rng), c(rng), c(rng)}),
                                0.0, 0.0);
    const C1Norm m = boundary_c1_norm(g, 512);
    CHECK(m.certified >= m.sampled);
  }
}
