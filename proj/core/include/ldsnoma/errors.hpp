#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ldsnoma {

/// Thrown when an iterative solver exhausts its iteration budget. Carries the
/// iteration count and the last residual so callers can report how close the
/// run got before giving up.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(std::string what, int iterations, double last_residual)
      : std::runtime_error(std::move(what)),
        iterations_(iterations),
        last_residual_(last_residual) {}

  int iterations() const { return iterations_; }
  double last_residual() const { return last_residual_; }

 private:
  int iterations_;
  double last_residual_;
};

/// Thrown by the Cholesky-based log-determinant when a pivot is not strictly
/// positive. The pivot index identifies the offending leading minor.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  NotPositiveDefiniteError(std::string what, std::ptrdiff_t pivot_index,
                           double pivot_value)
      : std::runtime_error(std::move(what)),
        pivot_index_(pivot_index),
        pivot_value_(pivot_value) {}

  std::ptrdiff_t pivot_index() const { return pivot_index_; }
  double pivot_value() const { return pivot_value_; }

 private:
  std::ptrdiff_t pivot_index_;
  double pivot_value_;
};

}  // namespace ldsnoma
