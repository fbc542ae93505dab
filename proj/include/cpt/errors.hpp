#pragma once

#include <stdexcept>
#include <string>

namespace cpt {

/// Composition or evaluation across incompatible system types.
class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& message)
      : std::invalid_argument(message) {}
};

/// A value violates the invariant of the type it is being built into.
class InvariantViolation : public std::invalid_argument {
 public:
  explicit InvariantViolation(const std::string& message)
      : std::invalid_argument(message) {}
};

/// Purity is not defined at the apex of the cone.
class ZeroProcess : public std::domain_error {
 public:
  explicit ZeroProcess(const std::string& message) : std::domain_error(message) {}
};

/// A protocol or family does not satisfy an operation's precondition.
class PreconditionFailed : public std::logic_error {
 public:
  explicit PreconditionFailed(const std::string& message)
      : std::logic_error(message) {}
};

}  // namespace cpt
