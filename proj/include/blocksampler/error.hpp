#pragma once

#include <stdexcept>
#include <string>

namespace blocksampler {

/// Raised when input data or configuration is malformed.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a sampler reaches a state that violates a model invariant
/// (non-finite log weight, non-positive shape, failed factorization...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blocksampler
