#pragma once

#include <stdexcept>
#include <string>

namespace shockcell {

enum class ErrorKind {
  InvalidState,   // EOS invariant violated (rho <= 0 or p + p_inf <= 0)
  NoConvergence,  // iterative solver exhausted its budget
  Vacuum,         // Riemann data would generate vacuum
  Config,         // malformed or inconsistent configuration
  Numerical,      // positivity failure during time stepping
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class InvalidStateError : public Error {
public:
  explicit InvalidStateError(const std::string& what) : Error(ErrorKind::InvalidState, what) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// Raised by the stepper when a cell leaves the admissible set. Carries the
/// offending cell and step so the caller can report and flush partial output.
class NumericalError : public Error {
public:
  NumericalError(const std::string& what, int i, int j, long step)
      : Error(ErrorKind::Numerical, what), i_(i), j_(j), step_(step) {}
  int cell_r() const noexcept { return i_; }
  int cell_z() const noexcept { return j_; }
  long step() const noexcept { return step_; }

private:
  int i_;
  int j_;
  long step_;
};

}  // namespace shockcell
