#pragma once

// Small dense linear algebra shared by the Fourier analysis and the oracles.
// Everything here is a free function over Eigen dense types.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <type_traits>

#include "stmg/errors.hpp"

namespace stmg {

using complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<complex>;
using RealVector = Vector<double>;
using ComplexVector = Vector<complex>;

/// Relative pivot threshold below which a factorization is reported singular.
inline constexpr double kPivotTolerance = 1e-14;

/// Kronecker product a ⊗ b.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> kron(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  static_assert(std::is_same_v<typename DerivedA::Scalar, typename DerivedB::Scalar>,
                "kron expects operands with the same scalar type");
  Matrix<typename DerivedA::Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Solves a·x = b with partial pivoting.
///
/// Throws SingularMatrix when a pivot of the LU factors falls below
/// kPivotTolerance times the largest entry magnitude of `a`.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> lu_solve(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.rows() != a.cols()) throw InconsistentData("lu_solve: matrix is not square");
  if (b.rows() != a.rows()) throw InconsistentData("lu_solve: right-hand side has wrong size");
  const Matrix<Scalar> dense = a;
  const double scale = dense.size() == 0 ? 0.0 : dense.cwiseAbs().maxCoeff();
  Eigen::PartialPivLU<Matrix<Scalar>> lu(dense);
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(std::abs(diag(i)) >= kPivotTolerance * scale) || scale == 0.0) {
      throw SingularMatrix("lu_solve: pivot " + std::to_string(i) + " below relative tolerance");
    }
  }
  Matrix<Scalar> x = lu.solve(Matrix<Scalar>(b));
  if (!x.allFinite()) throw SingularMatrix("lu_solve: non-finite solution");
  return x;
}

/// All eigenvalues of a square matrix, with multiplicity.
///
/// `max_iterations` caps the shifted QR iteration; zero selects 100·n².
template <typename Derived>
ComplexVector eigenvalues(const Eigen::MatrixBase<Derived>& a, Eigen::Index max_iterations = 0) {
  if (a.rows() != a.cols()) throw InconsistentData("eigenvalues: matrix is not square");
  const Eigen::Index n = a.rows();
  if (n == 0) return ComplexVector(0);
  const ComplexMatrix m = a.template cast<complex>();
  if (!m.allFinite()) throw NoConvergence("eigenvalues: matrix has non-finite entries");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver;
  solver.setMaxIterations(max_iterations > 0 ? max_iterations : std::max<Eigen::Index>(100 * n * n, 30));
  solver.compute(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("eigenvalues: QR iteration did not converge for n=" + std::to_string(n));
  }
  return solver.eigenvalues();
}

/// Largest eigenvalue magnitude.
template <typename Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& a) {
  const ComplexVector ev = eigenvalues(a);
  return ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
}

/// Integer power of a square matrix by repeated squaring.
template <typename Derived>
Matrix<typename Derived::Scalar> matrix_power(const Eigen::MatrixBase<Derived>& a, int exponent) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> result = Matrix<Scalar>::Identity(a.rows(), a.cols());
  Matrix<Scalar> base = a;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

}  // namespace stmg
