#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace afpr {

using cplx = std::complex<double>;

using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Delay-Doppler maps are stored row-major: row p (delay), column k (Doppler bin).
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised when an argument violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for numeric failures: divergence, eigen-solver non-convergence,
/// degenerate normalizations. The CLI maps these to exit code 2.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::size_t wrap_index(std::int64_t n, std::size_t len) {
  const auto m = static_cast<std::int64_t>(len);
  auto r = n % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

}  // namespace afpr
