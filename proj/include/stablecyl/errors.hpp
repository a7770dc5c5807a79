#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stablecyl {

// Invalid point of evaluation (y <= 0, t < 0, ...). Carries the offending
// (y, t) pair when one is known.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what,
                       std::optional<std::pair<double, double>> witness = std::nullopt)
      : std::domain_error(what), witness_(witness) {}
  const std::optional<std::pair<double, double>>& witness() const { return witness_; }

 private:
  std::optional<std::pair<double, double>> witness_;
};

class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NotApplicableError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver failure. `trace` holds the residual history up to the
// point of failure.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> trace = {})
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

// Raised by the counterexample construction when v' shows no sign change in
// a band. `residual` is the achieved C^2 misfit on the bands.
class NoRootError : public std::runtime_error {
 public:
  NoRootError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace stablecyl
