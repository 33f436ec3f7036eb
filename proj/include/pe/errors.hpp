#pragma once

#include <stdexcept>
#include <string>

namespace pe {

/// Input outside the mathematical domain of an operation (non-positive
/// density, vacuum pair, gamma <= 1, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A state left the subsonic neighborhood around the equilibrium.
class AdmissibilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Time step exceeds the configured CFL fraction.
class CflError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Not enough windows/snapshots to fit a decay rate.
class InsufficientDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration (parse or validation failure).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written; the message names the path.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace pe
