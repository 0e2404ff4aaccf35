#pragma once

#include <stdexcept>

namespace omsub {

// Base class of every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid physical parameters, grids, or configuration values. The message
// names every violated field.
struct ParameterError : Error {
  using Error::Error;
};

// The drift matrix has an eigenvalue with nonnegative real part, so the
// covariance dynamics have no stationary point.
struct InstabilityError : Error {
  using Error::Error;
};

// Photon subtraction requested from a field indistinguishable from vacuum;
// the conditioning event has zero probability.
struct VacuumFieldError : Error {
  using Error::Error;
};

// The mechanical covariance block fails the positivity condition that makes
// the conditional Wigner function integrable.
struct DegenerateMechanicalBlockError : Error {
  using Error::Error;
};

// A built-in numerical self-check failed: the closed-form and quadrature
// routes for an overlap integral disagree, or a Wigner function does not
// integrate to one on the documented grid. Signals a coefficient bug or a
// state outside the quadrature window, never a user mistake.
struct QuadratureDisagreementError : Error {
  using Error::Error;
};

}  // namespace omsub
