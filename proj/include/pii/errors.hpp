#pragma once
#include <stdexcept>
#include <string>

namespace pii {

// Argument outside the domain an operation supports.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Malformed or inconsistent user-facing parameters.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integration gave up; x,u,u' record where.
struct IntegrationError : NumericalError {
  double x, u, du;
  IntegrationError(const std::string& what, double x_, double u_, double du_)
      : NumericalError(what), x(x_), u(u_), du(du_) {}
};

struct FitError : NumericalError {
  using NumericalError::NumericalError;
};

struct BracketError : NumericalError {
  using NumericalError::NumericalError;
};

// Requested window could not be reached with trustworthy accuracy.
struct WindowError : NumericalError {
  double achieved;
  WindowError(const std::string& what, double achieved_)
      : NumericalError(what), achieved(achieved_) {}
};

// Two computations that must agree did not.
struct InconsistencyError : std::runtime_error {
  double discrepancy;
  InconsistencyError(const std::string& what, double d)
      : std::runtime_error(what), discrepancy(d) {}
};

}  // namespace pii
