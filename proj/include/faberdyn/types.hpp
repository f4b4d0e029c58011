#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace faberdyn {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

/// Applies a linear operator to every column of a block: out = A * in.
/// `out` is sized by the caller.
struct LinearMap {
  Index dim = 0;
  std::function<void(const CMatrix& in, CMatrix& out)> apply;
};

/// Raised when a numerical routine cannot produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when caller-supplied data violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace faberdyn
