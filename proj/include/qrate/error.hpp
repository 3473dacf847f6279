#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qrate {

// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input: bad flags, malformed files, violated preconditions. CLI exit 2.
class usage_error : public error {
 public:
  using error::error;
};

// Configured resource cap exceeded (dimension, grid size). CLI exit 3.
class resource_error : public error {
 public:
  using error::error;
};

// Iterative solver did not converge. Carries the best iterate seen so that a
// caller can inspect how far the solve got; never used to return a silently
// wrong value. CLI exit 4.
class solver_error : public error {
 public:
  solver_error(const std::string& msg, std::vector<double> best_iterate,
               double residual)
      : error(msg), best_(std::move(best_iterate)), residual_(residual) {}

  const std::vector<double>& best_iterate() const { return best_; }
  double residual() const { return residual_; }

 private:
  std::vector<double> best_;
  double residual_;
};

}  // namespace qrate
