#include "irsnoma/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace irsnoma {

HermitianMatrix::HermitianMatrix(const ComplexMatrix& raw) {
  if (raw.rows() != raw.cols()) {
    throw InvalidInputError("HermitianMatrix: matrix must be square");
  }
  if (!raw.allFinite()) {
    throw InvalidInputError("HermitianMatrix: entries must be finite");
  }
  mat_ = 0.5 * (raw + raw.adjoint());
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
  return HermitianMatrix(ComplexMatrix::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::outer(const ComplexVector& v) {
  return HermitianMatrix(v * v.adjoint());
}

double hermitian_inner(const HermitianMatrix& a, const HermitianMatrix& x) {
  if (a.dim() != x.dim()) {
    throw InvalidInputError("hermitian_inner: dimension mismatch");
  }
  return a.matrix().cwiseProduct(x.matrix().conjugate()).sum().real();
}

EigenDecomposition hermitian_eig(const HermitianMatrix& x) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(x.matrix());
  if (solver.info() != Eigen::Success) {
    throw InvalidInputError("hermitian_eig: eigensolver failed");
  }
  const Eigen::Index n = x.dim();
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

std::pair<double, ComplexVector> leading_eigpair(const HermitianMatrix& x) {
  const EigenDecomposition eig = hermitian_eig(x);
  return {eig.eigenvalues(0), eig.eigenvectors.col(0)};
}

namespace detail {

void psd_clip_in_place(ComplexMatrix& x) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(x);
  RealVector vals = solver.eigenvalues().cwiseMax(0.0);
  x.noalias() = solver.eigenvectors() * vals.asDiagonal() *
                solver.eigenvectors().adjoint();
}

}  // namespace detail

HermitianMatrix psd_project(const HermitianMatrix& x) {
  ComplexMatrix m = x.matrix();
  detail::psd_clip_in_place(m);
  return HermitianMatrix(m);
}

ComplexVector rank_one_factor(const HermitianMatrix& x, double tol) {
  if (tol < 0.0) {
    throw InvalidInputError("rank_one_factor: tol must be nonnegative");
  }
  const double tr = x.trace();
  if (tr <= 0.0) {
    throw DegenerateInputError("rank_one_factor: trace must be positive");
  }
  auto [sigma1, u1] = leading_eigpair(x);
  const double residual = (tr - sigma1) / tr;
  if (residual > tol) {
    throw NotRankOneError("rank_one_factor: relative residual " +
                          std::to_string(residual) + " exceeds tolerance " +
                          std::to_string(tol));
  }
  ComplexVector w = std::sqrt(std::max(sigma1, 0.0)) * u1;
  // Deterministic global phase: largest-magnitude entry real nonnegative.
  Eigen::Index pivot = 0;
  w.cwiseAbs().maxCoeff(&pivot);
  const double mag = std::abs(w(pivot));
  if (mag > 0.0) {
    w *= std::conj(w(pivot)) / mag;
  }
  return w;
}

HermitianMatrix spectral_subgradient(const HermitianMatrix& x) {
  auto [sigma1, u1] = leading_eigpair(x);
  (void)sigma1;
  return HermitianMatrix::outer(u1);
}

}  // namespace irsnoma
