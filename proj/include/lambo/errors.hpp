#pragma once

#include <stdexcept>
#include <string>

namespace lambo {

/// Malformed arguments: dimension mismatches, empty regions, unknown ids.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The Gram matrix could not be factorized even after jitter escalation.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An algorithmic guarantee was violated at runtime (loss bounds, laziness).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// depth_from_costs could not produce a non-negative last-module depth.
class HorizonTooSmall : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Objective evaluation failed inside a run; carries iteration context.
class ObjectiveError : public std::runtime_error {
 public:
  ObjectiveError(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

/// Configuration file problems, reported with a 1-based line number when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace lambo
