#pragma once

#include <stdexcept>
#include <string>

namespace stokep {

/// Precondition violations: bad shapes, wrong interpretation flags, zero counts.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model or integrator left its numeric domain (non-finite values,
/// near-collision radius, unbound orbit, ...).
class NumericDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundOrbitError : public NumericDomainError {
 public:
  using NumericDomainError::NumericDomainError;
};

/// Eccentricity too small for the pericenter angle to carry information.
class PericenterSingularityError : public NumericDomainError {
 public:
  using NumericDomainError::NumericDomainError;
};

/// Every realization of an ensemble was excluded.
class EnsembleDegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Monte Carlo noise floor is above the weak-error signal.
class InconclusiveStudyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stokep
