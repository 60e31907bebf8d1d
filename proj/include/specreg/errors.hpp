#pragma once

#include <stdexcept>
#include <string>

namespace specreg {

// Argument outside the mathematical domain of an operation (t <= 0, lambda > 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Index outside [1, p].
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Mismatched vector / matrix dimensions, or a non-symmetric Gram matrix.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A certified object (profile, packing, alternative family) could not be built.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or empty input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A decay hypothesis (EIGUP / EIGLOW) required by a command does not hold.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specreg
