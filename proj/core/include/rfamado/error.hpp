#pragma once

#include <stdexcept>
#include <string>

namespace rfamado {

/// Malformed input data: bad files, violated dataset invariants, mismatched
/// partitions.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (c <= 0, k > p, alpha > 1, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rfamado
