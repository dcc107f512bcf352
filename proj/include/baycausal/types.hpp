#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace baycausal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Support = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Bad input: dimensions, malformed files, violated structural assumptions.
// Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class StabilityError : public ValidationError {
 public:
  StabilityError(const std::string& what, double radius)
      : ValidationError(what), radius_(radius) {}
  double radius() const { return radius_; }

 private:
  double radius_;
};

// Singular systems, non-finite densities, failed factorizations.
// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace baycausal
