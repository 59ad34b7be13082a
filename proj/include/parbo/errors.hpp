#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace parbo {

/// Input outside the domain an operation is defined on (e.g. a point outside its box).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Cholesky factorization failed even after jitter escalation.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::vector<double> jitter_levels)
      : std::runtime_error(what), jitter_levels_(std::move(jitter_levels)) {}

  const std::vector<double>& jitter_levels() const noexcept { return jitter_levels_; }

 private:
  std::vector<double> jitter_levels_;
};

/// Extending a Cholesky factor would produce a non-positive pivot.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& what, double pivot)
      : std::runtime_error(what), pivot_(pivot) {}

  double pivot() const noexcept { return pivot_; }

 private:
  double pivot_;
};

/// Slice sampler failed to find an acceptable point while shrinking.
class SamplerStuckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed event log; carries the 1-based line number of the offending record.
class LogFormatError : public std::runtime_error {
 public:
  LogFormatError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class RunAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace parbo
