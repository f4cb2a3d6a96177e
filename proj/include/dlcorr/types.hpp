#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace dlcorr {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using MatrixXc = Matrix<Complex>;
using VectorXd = Vector<double>;
using VectorXc = Vector<Complex>;

inline constexpr Complex kImag{0.0, 1.0};

// Default tolerances. Where an operation accepts a tolerance parameter these
// are the defaults; the values are part of the numerical contract.
namespace tol {
inline constexpr double span_residual = 1e-10;    // weak-zero membership test
inline constexpr double rank_rel = 1e-10;         // SVD rank decisions
inline constexpr double inverse_identity = 1e-12; // D*C = I on second-class block
inline constexpr double block_reconstruct = 1e-10;
inline constexpr double orthogonality = 1e-12;
inline constexpr double antisymmetry = 1e-12;
inline constexpr double condition_limit = 1e12;
inline constexpr double constraint_surface = 1e-9; // initial-point check
inline constexpr double hermitian = 1e-10;
inline constexpr double unitary = 1e-9;
inline constexpr double density_trace = 1e-10;
inline constexpr double density_min_eig = -1e-8;
inline constexpr double gamma_psd = -1e-8;
inline constexpr double kraus_completeness = 1e-10;
inline constexpr double thermal_tail = 1e-8;
} // namespace tol

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.rows() == 0 || m.cols() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
double hermiticity_residual(const Eigen::MatrixBase<Derived>& m) {
  return max_abs(m.derived() - m.derived().adjoint().eval());
}

template <typename Derived>
double antisymmetry_residual(const Eigen::MatrixBase<Derived>& m) {
  return max_abs(m.derived() + m.derived().transpose().eval());
}

inline double unitarity_residual(const MatrixXc& u) {
  return max_abs((u.adjoint() * u - MatrixXc::Identity(u.cols(), u.cols())).eval());
}

} // namespace dlcorr
