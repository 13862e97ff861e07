#pragma once

#include <stdexcept>
#include <string>

namespace bnlab {

/// Parameters outside the admissible range (dimension, exponent, radius, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// The ODE integrator could not make progress (step underflow, non-finite state).
struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No solution of the requested size exists on the sampled branch.
struct UnreachableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A fit or root search failed to produce a usable answer.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bnlab

namespace bnlab {

/// Evaluation exactly at a singular point (e.g. the pole of a Green's function).
struct SingularityError : DomainError {
  using DomainError::DomainError;
};

}  // namespace bnlab
