#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace lngp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Generic runtime failure (I/O, numerics, sampler aborts).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid inputs or configuration, detected before any computation.
// The CLI maps this to exit code 2.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace lngp
