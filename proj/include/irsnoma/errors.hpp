#pragma once

#include <stdexcept>
#include <string>

namespace irsnoma {

/// Argument violates a documented precondition (bad dimension, non-finite
/// data, malformed program, ...).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Matrix failed the rank-one certificate required for factorization.
class NotRankOneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// PSD factorization requested for a matrix with nonpositive trace.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// De-homogenization would divide by a near-zero factor entry.
class DegenerateFactorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file could not be parsed or validated; the message names
/// the offending line or field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace irsnoma
