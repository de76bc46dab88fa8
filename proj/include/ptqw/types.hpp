#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ptqw {

using Real = double;
using Complex = std::complex<Real>;

using VectorXc = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using MatrixXc = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using Matrix2c = Eigen::Matrix<Complex, 2, 2>;
using SparseMatrixXc = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

inline constexpr Real kPi = std::numbers::pi_v<Real>;

/// Raised when a caller violates an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quasi-energy eps = i log(lambda) on the principal branch:
/// Re eps = -arg(lambda) folded into (-pi, pi], Im eps = ln|lambda|.
template <typename Scalar>
std::complex<Scalar> quasienergy(const std::complex<Scalar>& lambda) {
  Scalar re = -std::arg(lambda);
  if (re <= -std::numbers::pi_v<Scalar>) re += 2 * std::numbers::pi_v<Scalar>;
  return {re, std::log(std::abs(lambda))};
}

/// Distance of a real quasi-energy from pi, measured on the circle.
template <typename Scalar>
Scalar distance_from_pi(Scalar re_eps) {
  return std::numbers::pi_v<Scalar> - std::abs(re_eps);
}

}  // namespace ptqw
