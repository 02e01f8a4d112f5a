#pragma once

#include <stdexcept>

namespace rfamado::cli {

/// Bad flags or paths detected before any computation starts (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rfamado::cli
