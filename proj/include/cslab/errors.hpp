#pragma once

#include <stdexcept>
#include <string>

namespace cslab {

/// Bad user input or violated precondition. CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A solver failed to converge within its budget. CLI exit code 3.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A mathematical invariant that must hold for correct states was violated.
/// CLI exit code 4.
class PropertyViolation : public std::runtime_error {
 public:
  explicit PropertyViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cslab
