#pragma once

#include <optional>
#include <vector>

namespace pe {

/// A scalar T-periodic function of time.
///
/// Two representations are supported:
///   - fourier:    mean + sum_k a_k cos(k w t) + b_k sin(k w t), w = 2 pi / T
///   - power_sine: A |sin(w t + phase)|^p, which is C^1 for p > 1 but has an
///                 unbounded second derivative for p < 2. It exists to build
///                 boundary data with deliberately limited regularity.
///
/// Periodicity is exact by construction: every evaluation first reduces t
/// modulo the period.
class PeriodicSignal {
public:
  enum class Kind { fourier, power_sine };

  PeriodicSignal() = default;

  static PeriodicSignal zero(double period);
  static PeriodicSignal fourier(double period, double mean,
                                std::vector<double> cos_coeffs,
                                std::vector<double> sin_coeffs);
  /// amplitude * sin(2 pi t / period)
  static PeriodicSignal sine(double period, double amplitude);
  static PeriodicSignal power_sine(double period, double amplitude,
                                   double exponent, double phase = 0.0);

  [[nodiscard]] double value(double t) const;
  [[nodiscard]] double derivative(double t) const;
  [[nodiscard]] double second_derivative(double t) const;

  /// Upper bound on max(sup|f|, sup|f'|) from the coefficients alone.
  [[nodiscard]] double certified_c1_bound() const;
  /// Bound on sup|f''| when finite; empty for power_sine with p < 2.
  [[nodiscard]] std::optional<double> second_derivative_bound() const;

  /// The signal t -> f(t + shift).
  [[nodiscard]] PeriodicSignal shifted(double shift) const;
  [[nodiscard]] PeriodicSignal scaled(double factor) const;
  [[nodiscard]] bool is_zero() const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double period() const { return period_; }
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] const std::vector<double>& cos_coeffs() const { return cos_; }
  [[nodiscard]] const std::vector<double>& sin_coeffs() const { return sin_; }
  [[nodiscard]] double amplitude() const { return amplitude_; }
  [[nodiscard]] double exponent() const { return exponent_; }
  [[nodiscard]] double phase() const { return phase_; }

private:
  [[nodiscard]] double wrap(double t) const;
  [[nodiscard]] double omega() const;

  Kind kind_ = Kind::fourier;
  double period_ = 1.0;
  double mean_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
  double amplitude_ = 0.0;
  double exponent_ = 2.0;
  double phase_ = 0.0;
};

/// Periodic t-wrap into [0, period).
double wrap_periodic(double t, double period);

} // namespace pe
