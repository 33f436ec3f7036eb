#include "pe/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pe/errors.hpp"

namespace pe {

double wrap_periodic(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

PeriodicSignal PeriodicSignal::zero(double period) {
  return fourier(period, 0.0, {}, {});
}

PeriodicSignal PeriodicSignal::fourier(double period, double mean,
                                       std::vector<double> cos_coeffs,
                                       std::vector<double> sin_coeffs) {
  if (!(period > 0.0)) throw DomainError("signal period must be positive");
  PeriodicSignal s;
  s.kind_ = Kind::fourier;
  s.period_ = period;
  s.mean_ = mean;
  s.cos_ = std::move(cos_coeffs);
  s.sin_ = std::move(sin_coeffs);
  return s;
}

PeriodicSignal PeriodicSignal::sine(double period, double amplitude) {
  return fourier(period, 0.0, {}, {amplitude});
}

PeriodicSignal PeriodicSignal::power_sine(double period, double amplitude,
                                          double exponent, double phase) {
  if (!(period > 0.0)) throw DomainError("signal period must be positive");
  if (!(exponent > 1.0))
    throw DomainError("power_sine exponent must exceed 1 for a C1 signal");
  PeriodicSignal s;
  s.kind_ = Kind::power_sine;
  s.period_ = period;
  s.amplitude_ = amplitude;
  s.exponent_ = exponent;
  s.phase_ = phase;
  return s;
}

double PeriodicSignal::omega() const { return 2.0 * std::numbers::pi / period_; }

double PeriodicSignal::wrap(double t) const { return wrap_periodic(t, period_); }

double PeriodicSignal::value(double t) const {
  const double w = omega();
  const double tw = wrap(t);
  if (kind_ == Kind::power_sine) {
    return amplitude_ * std::pow(std::abs(std::sin(w * tw + phase_)), exponent_);
  }
  double v = mean_;
  for (std::size_t k = 0; k < cos_.size(); ++k)
    v += cos_[k] * std::cos(static_cast<double>(k + 1) * w * tw);
  for (std::size_t k = 0; k < sin_.size(); ++k)
    v += sin_[k] * std::sin(static_cast<double>(k + 1) * w * tw);
  return v;
}

double PeriodicSignal::derivative(double t) const {
  const double w = omega();
  const double tw = wrap(t);
  if (kind_ == Kind::power_sine) {
    const double s = std::sin(w * tw + phase_);
    if (s == 0.0) return 0.0;
    const double sgn = s > 0.0 ? 1.0 : -1.0;
    return amplitude_ * exponent_ * std::pow(std::abs(s), exponent_ - 1.0) * sgn *
           std::cos(w * tw + phase_) * w;
  }
  double v = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double kw = static_cast<double>(k + 1) * w;
    v -= cos_[k] * kw * std::sin(kw * tw);
  }
  for (std::size_t k = 0; k < sin_.size(); ++k) {
    const double kw = static_cast<double>(k + 1) * w;
    v += sin_[k] * kw * std::cos(kw * tw);
  }
  return v;
}

double PeriodicSignal::second_derivative(double t) const {
  const double w = omega();
  const double tw = wrap(t);
  if (kind_ == Kind::power_sine) {
    const double arg = w * tw + phase_;
    const double s = std::abs(std::sin(arg));
    const double c = std::cos(arg);
    const double p = exponent_;
    if (s == 0.0) return p < 2.0 ? HUGE_VAL : (p == 2.0 ? 2.0 * amplitude_ * w * w : 0.0);
    // d2/dt2 |sin|^p = p w^2 |s|^(p-2) ((p-1) c^2 - s^2)
    return amplitude_ * p * w * w * std::pow(s, p - 2.0) * ((p - 1.0) * c * c - s * s);
  }
  double v = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double kw = static_cast<double>(k + 1) * w;
    v -= cos_[k] * kw * kw * std::cos(kw * tw);
  }
  for (std::size_t k = 0; k < sin_.size(); ++k) {
    const double kw = static_cast<double>(k + 1) * w;
    v -= sin_[k] * kw * kw * std::sin(kw * tw);
  }
  return v;
}

double PeriodicSignal::certified_c1_bound() const {
  const double w = omega();
  if (kind_ == Kind::power_sine) {
    return std::abs(amplitude_) * std::max(1.0, exponent_ * w);
  }
  double sup_bound = std::abs(mean_);
  double deriv_bound = 0.0;
  auto accumulate = [&](const std::vector<double>& c) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      sup_bound += std::abs(c[k]);
      deriv_bound += std::abs(c[k]) * static_cast<double>(k + 1) * w;
    }
  };
  accumulate(cos_);
  accumulate(sin_);
  return std::max(sup_bound, deriv_bound);
}

std::optional<double> PeriodicSignal::second_derivative_bound() const {
  const double w = omega();
  if (kind_ == Kind::power_sine) {
    if (exponent_ < 2.0) return std::nullopt;
    return std::abs(amplitude_) * exponent_ * exponent_ * w * w;
  }
  double b = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) b += std::abs(cos_[k]) * std::pow((k + 1) * w, 2);
  for (std::size_t k = 0; k < sin_.size(); ++k) b += std::abs(sin_[k]) * std::pow((k + 1) * w, 2);
  return b;
}

PeriodicSignal PeriodicSignal::shifted(double shift) const {
  PeriodicSignal s = *this;
  const double w = omega();
  if (kind_ == Kind::power_sine) {
    s.phase_ = phase_ + w * shift;
    return s;
  }
  const std::size_t n = std::max(cos_.size(), sin_.size());
  s.cos_.assign(n, 0.0);
  s.sin_.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = k < cos_.size() ? cos_[k] : 0.0;
    const double b = k < sin_.size() ? sin_[k] : 0.0;
    const double phi = static_cast<double>(k + 1) * w * shift;
    s.cos_[k] = a * std::cos(phi) + b * std::sin(phi);
    s.sin_[k] = b * std::cos(phi) - a * std::sin(phi);
  }
  return s;
}

PeriodicSignal PeriodicSignal::scaled(double factor) const {
  PeriodicSignal s = *this;
  s.mean_ *= factor;
  for (double& c : s.cos_) c *= factor;
  for (double& c : s.sin_) c *= factor;
  s.amplitude_ *= factor;
  return s;
}

bool PeriodicSignal::is_zero() const {
  if (kind_ == Kind::power_sine) return amplitude_ == 0.0;
  if (mean_ != 0.0) return false;
  for (double c : cos_)
    if (c != 0.0) return false;
  for (double c : sin_)
    if (c != 0.0) return false;
  return true;
}

} // namespace pe
