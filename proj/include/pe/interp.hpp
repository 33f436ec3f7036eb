#pragma once

#include <array>
#include <cmath>

namespace pe::interp {

// Four-point Lagrange weights on nodes {-1, 0, 1, 2} evaluated at s.
// Valid for any s; s in [0, 1) is the centered case.
inline std::array<double, 4> lagrange4(double s) {
  return {-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
          -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0};
}

// d/ds of lagrange4(s).
inline std::array<double, 4> lagrange4_derivative(double s) {
  return {-(3.0 * s * s - 6.0 * s + 2.0) / 6.0, (3.0 * s * s - 4.0 * s - 1.0) / 2.0,
          -(3.0 * s * s - 2.0 * s - 2.0) / 2.0, (3.0 * s * s - 1.0) / 6.0};
}

// Stencil location on a periodic axis of n cells with spacing h: base index
// (already reduced mod n) and fractional offset in [0, 1).
struct PeriodicLocation {
  int base;
  double frac;
};

inline PeriodicLocation locate_periodic(double t, double h, int n) {
  const double u = t / h;
  double fl = std::floor(u);
  double frac = u - fl;
  if (frac >= 1.0) {
    frac = 0.0;
    fl += 1.0;
  }
  long long b = static_cast<long long>(fl) % n;
  if (b < 0) b += n;
  return {static_cast<int>(b), frac};
}

inline int wrap_index(int j, int n) {
  j %= n;
  return j < 0 ? j + n : j;
}

// Stencil on a clamped axis with n >= 4 nodes: base i in [1, n-3] so that
// i-1 .. i+2 stay inside, and s = u - i may fall in [-1, 2] near the ends.
struct ClampedLocation {
  int base;
  double frac;
};

inline ClampedLocation locate_clamped(double x, double h, int n) {
  const double u = x / h;
  int i = static_cast<int>(std::floor(u));
  if (i < 1) i = 1;
  if (i > n - 3) i = n - 3;
  return {i, u - static_cast<double>(i)};
}

// Linear cell location on a clamped axis: cell index in [0, n-2], fraction.
struct LinearLocation {
  int base;
  double frac;
};

inline LinearLocation locate_linear(double x, double h, int n) {
  const double u = x / h;
  int i = static_cast<int>(std::floor(u));
  if (i < 0) i = 0;
  if (i > n - 2) i = n - 2;
  return {i, u - static_cast<double>(i)};
}

} // namespace pe::interp
