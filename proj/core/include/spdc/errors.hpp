#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spdc {

/// Evaluation outside a model's validity domain (e.g. wavelength outside a
/// Sellmeier range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller supplied inconsistent or degenerate input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy answer (coarse grid,
/// non-convergent fit, no interior optimum, ...).
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Aggregated configuration errors; every failure carries its line number.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace spdc
