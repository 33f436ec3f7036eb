#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pe/errors.hpp"
#include "pe/interp.hpp"
#include "pe/signal.hpp"

using namespace pe;
using doctest::Approx;

TEST_CASE("wrap into one period") {
  CHECK(wrap_periodic(5.0, 4.0) == Approx(1.0));
  CHECK(wrap_periodic(-1.0, 4.0) == Approx(3.0));
  CHECK(wrap_periodic(8.0, 4.0) == 0.0);
  const double w = wrap_periodic(-1e-18, 4.0);
  CHECK(w >= 0.0);
  CHECK(w < 4.0);
}

TEST_CASE("fourier signal values and derivatives") {
  const double T = 3.0, w = 2.0 * M_PI / T;
  const auto s = PeriodicSignal::fourier(T, 0.1, {0.2, 0.05}, {0.3});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> tt(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const double t = tt(rng);
    const double v = 0.1 + 0.2 * std::cos(w * t) + 0.05 * std::cos(2 * w * t) + 0.3 * std::sin(w * t);
    const double d = -0.2 * w * std::sin(w * t) - 0.1 * w * std::sin(2 * w * t) + 0.3 * w * std::cos(w * t);
    CHECK(s.value(t) == Approx(v).epsilon(1e-12));
    CHECK(s.derivative(t) == Approx(d).epsilon(1e-10));
    CHECK(std::abs(s.value(t + T) - s.value(t)) < 1e-15);
    CHECK(s.shifted(0.7).value(t) == Approx(s.value(t + 0.7)).epsilon(1e-12));
    CHECK(s.scaled(-2.0).value(t) == Approx(-2.0 * s.value(t)).epsilon(1e-14));
  }
  CHECK(s.certified_c1_bound() >= 0.1 + 0.2 + 0.05 + 0.3 - 1e-15);
  REQUIRE(s.second_derivative_bound().has_value());
  CHECK(PeriodicSignal::zero(T).is_zero());
  CHECK_FALSE(s.is_zero());
}

TEST_CASE("power sine regularity") {
  const double T = 4.0;
  const auto s = PeriodicSignal::power_sine(T, 0.01, 1.2);
  CHECK_FALSE(s.second_derivative_bound().has_value());
  CHECK(PeriodicSignal::power_sine(T, 0.01, 2.5).second_derivative_bound().has_value());
  CHECK(s.value(1.0) == Approx(0.01).epsilon(1e-14));
  CHECK(s.value(0.0) == 0.0);
  // derivative matches a centered difference away from the kinks
  const double h = 1e-6;
  for (double t : {0.3, 0.9, 1.7, 2.6, 3.3}) {
    CHECK(s.derivative(t) == Approx((s.value(t + h) - s.value(t - h)) / (2 * h)).epsilon(1e-6));
  }
  CHECK(s.certified_c1_bound() >= std::abs(s.derivative(0.01)));
  CHECK_THROWS_AS(PeriodicSignal::power_sine(T, 1.0, 1.0), DomainError);
  CHECK(s.shifted(0.5).value(0.2) == Approx(s.value(0.7)).epsilon(1e-13));
}

TEST_CASE("Lagrange weights") {
  for (double s : {0.0, 0.25, 0.5, 0.9, -0.5, 1.7}) {
    const auto w = interp::lagrange4(s);
    CHECK(w[0] + w[1] + w[2] + w[3] == Approx(1.0).epsilon(1e-14));
    // reproduces cubics on nodes -1, 0, 1, 2
    auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x + 0.25 * x * x * x; };
    CHECK(w[0] * p(-1) + w[1] * p(0) + w[2] * p(1) + w[3] * p(2) == Approx(p(s)).epsilon(1e-13));
    const auto d = interp::lagrange4_derivative(s);
    auto dp = [](double x) { return -2.0 + x + 0.75 * x * x; };
    CHECK(d[0] * p(-1) + d[1] * p(0) + d[2] * p(1) + d[3] * p(2) == Approx(dp(s)).epsilon(1e-12));
  }
  const auto loc = interp::locate_periodic(-0.25, 1.0, 8);
  CHECK(loc.base == 7);
  CHECK(loc.frac == Approx(0.75));
  CHECK(interp::locate_clamped(0.1, 1.0, 10).base == 1);
  CHECK(interp::locate_clamped(8.9, 1.0, 10).base == 7);
}
