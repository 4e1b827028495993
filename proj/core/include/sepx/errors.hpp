#pragma once

#include <stdexcept>
#include <string>

namespace sepx {

/// Violated precondition on an argument (wrong dimension, invalid parameter).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid or unsupported configuration, including missing upstream stage files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StageDependencyError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Base for failures of the numerics themselves.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CoveringError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OutOfDomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace sepx
