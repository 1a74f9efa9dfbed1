#pragma once

#include <stdexcept>
#include <string>

namespace safel2o {

// Invalid arguments, incompatible shapes, unsupported combinations. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (non-convergence, singular factorization, non-finite values).
// Carries the best available estimate when one exists. CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double best_estimate = 0.0)
      : std::runtime_error(what), best_estimate_(best_estimate) {}
  double best_estimate() const { return best_estimate_; }

 private:
  double best_estimate_;
};

}  // namespace safel2o
