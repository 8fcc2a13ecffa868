#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "irsnoma/errors.hpp"

namespace irsnoma {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Dense complex Hermitian matrix. Construction symmetrizes the input and
/// rejects non-finite or non-square data, so a held value is always exactly
/// conjugate-symmetric.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& raw);

  static HermitianMatrix identity(Eigen::Index dim);
  static HermitianMatrix zero(Eigen::Index dim);
  /// v v^H
  static HermitianMatrix outer(const ComplexVector& v);

  Eigen::Index dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }
  double trace() const { return mat_.trace().real(); }
  double frobenius_norm() const { return mat_.norm(); }

 private:
  ComplexMatrix mat_;
};

/// Real inner product Re tr(A^H X) of two Hermitian matrices.
double hermitian_inner(const HermitianMatrix& a, const HermitianMatrix& x);

struct EigenDecomposition {
  RealVector eigenvalues;      // sorted descending
  ComplexMatrix eigenvectors;  // orthonormal columns, matching order
};

/// Full eigendecomposition, eigenvalues descending.
EigenDecomposition hermitian_eig(const HermitianMatrix& x);

/// Largest eigenvalue and a corresponding unit eigenvector.
std::pair<double, ComplexVector> leading_eigpair(const HermitianMatrix& x);

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
HermitianMatrix psd_project(const HermitianMatrix& x);

/// Factor a near-rank-one PSD matrix as w w^H with w = sqrt(sigma1) u1.
///
/// Requires tr(X) > 0 and a relative rank-one residual
/// (tr(X) - sigma1(X)) / tr(X) <= tol; throws NotRankOneError or
/// DegenerateInputError otherwise. The global phase is fixed by making the
/// largest-magnitude entry of w real and nonnegative.
ComplexVector rank_one_factor(const HermitianMatrix& x, double tol);

/// Subgradient of the spectral norm at a PSD matrix: u1 u1^H for the
/// leading unit eigenvector u1 (any member of the subdifferential when the
/// top eigenvalue is multiple; deterministic for a fixed eigensolver).
HermitianMatrix spectral_subgradient(const HermitianMatrix& x);

namespace detail {
/// In-place PSD projection on a raw matrix; shared with the conic solver's
/// cone-projection step.
void psd_clip_in_place(ComplexMatrix& x);
}  // namespace detail

}  // namespace irsnoma
