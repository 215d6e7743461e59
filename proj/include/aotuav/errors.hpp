#pragma once

#include <stdexcept>
#include <string>

namespace aot {

/// Bad or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition at run time (CLI exit code 3).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvalidGraph : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidTarget : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

class EnergyViolation : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

class DomainError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

class ShapeError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

/// Unreadable, truncated or version-mismatched checkpoint.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aot
