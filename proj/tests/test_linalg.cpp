#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irsnoma/linalg.hpp"
#include "test_util.hpp"

using namespace irsnoma;
using test_util::random_psd;
using test_util::random_vector;
using test_util::with_spectrum;

namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("construction symmetrizes and validates") {
  ComplexMatrix m(2, 2);
  m << Complex(1.0, 0.0), Complex(2.0, 1.0), Complex(2.0, -1.0 + 1e-13), Complex(3.0, 0.0);
  const HermitianMatrix h(m);
  CHECK((h.matrix() - h.matrix().adjoint()).norm() == 0.0);

  ComplexMatrix bad(2, 3);
  CHECK_THROWS_AS(HermitianMatrix{bad}, InvalidInputError);
  ComplexMatrix nan_mat = ComplexMatrix::Zero(2, 2);
  nan_mat(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(HermitianMatrix{nan_mat}, InvalidInputError);
}

TEST_CASE("eigendecomposition of diagonal and identity cases") {
  const auto eig = hermitian_eig(HermitianMatrix(diag2(3.0, 1.0)));
  CHECK(eig.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(1, 1)) == doctest::Approx(1.0));

  const auto id = hermitian_eig(HermitianMatrix::identity(2));
  CHECK(id.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(id.eigenvalues(1) == doctest::Approx(1.0));
  CHECK((id.eigenvectors.adjoint() * id.eigenvectors - ComplexMatrix::Identity(2, 2))
            .norm() < 1e-10);
}

TEST_CASE("eigenvalues recover a constructed spectrum") {
  Rng rng(11);
  Eigen::VectorXd spectrum(3);
  spectrum << 5.0, 2.0, -1.0;
  const HermitianMatrix x = with_spectrum(spectrum, rng);
  const auto eig = hermitian_eig(x);
  for (int i = 0; i < 3; ++i) {
    CHECK(eig.eigenvalues(i) == doctest::Approx(spectrum(i)).epsilon(1e-10));
  }
}

TEST_CASE("reconstruction and orthonormality invariants on random input") {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 + static_cast<int>(rng.next_u64() % 12);
    const HermitianMatrix x = test_util::random_hermitian(dim, rng);
    const auto eig = hermitian_eig(x);
    const ComplexMatrix rebuilt =
        eig.eigenvectors *
        eig.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
        eig.eigenvectors.adjoint();
    const double scale = std::max(1.0, x.frobenius_norm());
    CHECK((rebuilt - x.matrix()).norm() / scale < 1e-10);
    CHECK((eig.eigenvectors.adjoint() * eig.eigenvectors -
           ComplexMatrix::Identity(dim, dim))
              .norm() < 1e-10);
    for (int i = 0; i + 1 < dim; ++i) {
      CHECK(eig.eigenvalues(i) >= eig.eigenvalues(i + 1));
    }
  }
}

TEST_CASE("2x2 eigenvalues match the characteristic polynomial roots") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const HermitianMatrix x = test_util::random_hermitian(2, rng);
    const double a = x.matrix()(0, 0).real();
    const double c = x.matrix()(1, 1).real();
    const double off = std::abs(x.matrix()(0, 1));
    const double mid = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + off * off);
    const auto eig = hermitian_eig(x);
    CHECK(eig.eigenvalues(0) == doctest::Approx(mid + rad).epsilon(1e-10));
    CHECK(eig.eigenvalues(1) == doctest::Approx(mid - rad).epsilon(1e-10));
  }
}

TEST_CASE("leading eigenpair") {
  auto [v1, u1] = leading_eigpair(HermitianMatrix(diag2(3.0, 1.0)));
  CHECK(v1 == doctest::Approx(3.0));
  CHECK(std::abs(u1(0)) == doctest::Approx(1.0));

  Rng rng(14);
  ComplexVector u = random_vector(4, rng);
  u.normalize();
  const double alpha = 2.5;
  auto [val, vec] = leading_eigpair(HermitianMatrix(alpha * u * u.adjoint()));
  CHECK(val == doctest::Approx(alpha).epsilon(1e-10));
  CHECK(std::abs(vec.dot(u)) == doctest::Approx(1.0).epsilon(1e-10));

  const HermitianMatrix x = random_psd(5, rng);
  const auto eig = hermitian_eig(x);
  auto [top, topvec] = leading_eigpair(x);
  CHECK(top == doctest::Approx(eig.eigenvalues(0)));
  CHECK((x.matrix() * topvec - top * topvec).norm() <
        1e-9 * std::max(1.0, x.frobenius_norm()));
}

TEST_CASE("psd projection clips negative eigenvalues") {
  const HermitianMatrix projected = psd_project(HermitianMatrix(diag2(1.0, -2.0)));
  CHECK((projected.matrix() - diag2(1.0, 0.0)).norm() < 1e-12);

  Rng rng(15);
  const HermitianMatrix psd = random_psd(4, rng);
  CHECK((psd_project(psd).matrix() - psd.matrix()).norm() < 1e-10);

  // Known eigenbasis: the projection must clip exactly the negative part.
  Eigen::VectorXd spectrum(4);
  spectrum << 3.0, 1.0, -0.5, -2.0;
  ComplexMatrix basis;
  const HermitianMatrix x = with_spectrum(spectrum, rng, &basis);
  Eigen::VectorXd clipped = spectrum.cwiseMax(0.0);
  const ComplexMatrix expected =
      basis * clipped.asDiagonal().toDenseMatrix().cast<Complex>() * basis.adjoint();
  CHECK((psd_project(x).matrix() - expected).norm() < 1e-9);
}

TEST_CASE("psd projection is idempotent with nonnegative spectrum") {
  Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianMatrix x = test_util::random_hermitian(5, rng);
    const HermitianMatrix once = psd_project(x);
    const HermitianMatrix twice = psd_project(once);
    CHECK((once.matrix() - twice.matrix()).norm() < 1e-9);
    CHECK(hermitian_eig(once).eigenvalues.minCoeff() >= -1e-10);
  }
}

TEST_CASE("rank one factorization") {
  ComplexVector e1 = ComplexVector::Zero(2);
  e1(0) = 1.0;
  const ComplexVector w = rank_one_factor(HermitianMatrix(2.0 * e1 * e1.adjoint()), 1e-9);
  CHECK((w - std::sqrt(2.0) * e1).norm() < 1e-10);

  CHECK_THROWS_AS(rank_one_factor(HermitianMatrix::identity(2), 1e-6), NotRankOneError);
  CHECK_THROWS_AS(rank_one_factor(HermitianMatrix::zero(2), 1e-6), DegenerateInputError);
}

TEST_CASE("rank one factorization recovers random vectors up to phase") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next_u64() % 6);
    const ComplexVector w = random_vector(dim, rng);
    const ComplexVector got = rank_one_factor(HermitianMatrix::outer(w), 1e-9);
    // Align the global phase before comparing.
    const Complex phase = w.dot(got) / std::abs(w.dot(got));
    CHECK((w * phase - got).norm() <= 1e-8 * w.norm());
    // Deterministic tie-break: largest-magnitude entry is real nonnegative.
    Eigen::Index pivot = 0;
    got.cwiseAbs().maxCoeff(&pivot);
    CHECK(got(pivot).imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(got(pivot).real() >= 0.0);
  }
}

TEST_CASE("factorization residual bound holds near rank one") {
  Rng rng(18);
  const ComplexVector w = random_vector(4, rng);
  ComplexMatrix noisy = (w * w.adjoint());
  noisy += 1e-8 * random_psd(4, rng).matrix();
  const HermitianMatrix x(noisy);
  const double tol = (x.trace() - leading_eigpair(x).first) / x.trace() + 1e-12;
  const ComplexVector factor = rank_one_factor(x, tol * 1.01);
  const double residual =
      (x.matrix() - factor * factor.adjoint()).norm() / x.frobenius_norm();
  CHECK(residual <= std::sqrt(2.0 * tol * 1.01) * (1.0 + 1e-6));
}

TEST_CASE("spectral subgradient") {
  const HermitianMatrix g = spectral_subgradient(HermitianMatrix(diag2(3.0, 1.0)));
  CHECK((g.matrix() - diag2(1.0, 0.0)).norm() < 1e-12);

  const HermitianMatrix at_identity = spectral_subgradient(HermitianMatrix::identity(2));
  CHECK(at_identity.trace() == doctest::Approx(1.0));
  CHECK(hermitian_eig(at_identity).eigenvalues.minCoeff() >= -1e-12);
  CHECK(hermitian_eig(at_identity).eigenvalues(0) == doctest::Approx(1.0));

  Rng rng(19);
  Eigen::VectorXd spectrum(2);
  spectrum << 5.0, 1.0;
  ComplexMatrix basis;
  const HermitianMatrix x = with_spectrum(spectrum, rng, &basis);
  const ComplexVector q1 = basis.col(0);
  CHECK((spectral_subgradient(x).matrix() - q1 * q1.adjoint()).norm() < 1e-9);
}

TEST_CASE("trace dominates the spectral norm on the PSD cone") {
  Rng rng(20);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next_u64() % 5);
    const HermitianMatrix x = random_psd(dim, rng);
    const double gap = x.trace() - leading_eigpair(x).first;
    CHECK(gap >= -1e-10 * x.trace());
  }
  // Equality exactly on (numerically) rank-one matrices.
  const ComplexVector w = random_vector(4, rng);
  const HermitianMatrix rank_one = HermitianMatrix::outer(w);
  CHECK(rank_one.trace() - leading_eigpair(rank_one).first <=
        1e-10 * rank_one.trace());
}
