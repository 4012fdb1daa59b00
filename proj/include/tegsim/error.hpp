#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tegsim {

// Base of every toolkit error. Each subclass maps onto one CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric argument outside its domain (non-positive area, temperature...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A domain-type invariant does not hold (b > a, undersized cell, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed or unknown configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Lumped network with zero total resistance.
class SingularCircuit : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(std::string what, std::vector<double> residual_history)
      : Error(std::move(what)), history_(std::move(residual_history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

// Requested discretization would not fit the configured voxel budget.
class ResourceError : public Error {
 public:
  ResourceError(std::string what, double suggested_resolution)
      : Error(std::move(what)), suggested_(suggested_resolution) {}

  double suggested_resolution() const noexcept { return suggested_; }

 private:
  double suggested_;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidInput(msg);
}

inline void validate(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace detail
}  // namespace tegsim
