#pragma once

#include <stdexcept>
#include <string>

namespace jointgraph {

// Out-of-range block, variable or group index.
class IndexError : public std::out_of_range {
 public:
  explicit IndexError(const std::string& what) : std::out_of_range(what) {}
};

// Invalid parameter combination (M > nu, infeasible simulation, bad grid).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Input data that violates a precondition (asymmetric S, non-PD Omega, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure during evaluation (singular or indefinite matrix).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jointgraph
