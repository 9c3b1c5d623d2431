#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ncpath {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid numeric configuration (non-positive dimension, unknown preset, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Malformed or incomplete configuration file.
class ConfigParseError : public Error {
public:
  using Error::Error;
};

/// Geometrically impossible slit layout (overlap, non-increasing centers, ...).
class GeometryError : public Error {
public:
  using Error::Error;
};

/// Argument outside an operation's mathematical domain.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Result magnitude exceeds double range (complex erf deep in a growth sector).
class OverflowError : public Error {
public:
  using Error::Error;
};

/// Estimated or actual node count exceeds the direct-integration budget.
class BudgetError : public Error {
public:
  using Error::Error;
};

/// Normalization denominator vanished (the "false peaks" pathology).
class DegenerateNormalizationError : public Error {
public:
  using Error::Error;
};

/// Mesh refinement exhausted without meeting the tolerance.
/// Carries the last two iterates so callers can inspect how far apart they are.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& msg, std::complex<double> previous,
                   std::complex<double> current)
      : Error(msg), previous_(previous), current_(current) {}

  std::complex<double> previous_iterate() const { return previous_; }
  std::complex<double> current_iterate() const { return current_; }

private:
  std::complex<double> previous_;
  std::complex<double> current_;
};

}  // namespace ncpath
