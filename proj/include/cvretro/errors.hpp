#pragma once

#include <stdexcept>
#include <string>

namespace cvretro {

/// A linear solve met a matrix too close to singular (rcond below threshold).
class NumericalSingularity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear equality constraints with no solution.
class InfeasibleConstraints : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed run configuration; the message carries the field path or line/column.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvretro
