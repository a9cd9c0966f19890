#pragma once

#include <stdexcept>
#include <string>

namespace graspguard {

/// Raised when a caller breaks a documented precondition (dimension
/// mismatch, non-positive parameter, indefinite cost matrix, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for malformed or inconsistent scenario / filter configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace graspguard
