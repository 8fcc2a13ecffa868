#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irsnoma/dc_phase.hpp"
#include "test_util.hpp"

using namespace irsnoma;
using test_util::random_unit_modulus;
using test_util::random_vector;

namespace {

constexpr double kPi = 3.14159265358979323846;

// |v^H a + b|^2 evaluated directly from the definition.
double constraint_term(const ComplexVector& v, const ComplexVector& a, Complex b) {
  return std::norm(v.dot(a) + b);
}

// Hand-built single-constraint data for N elements: gamma sigma2 <= |v^H a + b|^2.
HomogenizedConstraintData single_user_data(const ComplexVector& a, Complex b,
                                           double gamma, double sigma2) {
  const int n = static_cast<int>(a.size());
  HomogenizedConstraintData data;
  data.elements = n;
  data.gamma_min = {gamma};
  data.sigma2 = sigma2;
  ComplexMatrix block = ComplexMatrix::Zero(n + 1, n + 1);
  block.topLeftCorner(n, n) = a * a.adjoint();
  block.topRightCorner(n, 1) = a * std::conj(b);
  block.bottomLeftCorner(1, n) = b * a.adjoint();
  data.r = {{HermitianMatrix(block)}};
  data.b_sq = {{std::norm(b)}};
  return data;
}

}  // namespace

TEST_CASE("zero beamformers homogenize to zero data") {
  const ChannelRealization r = test_util::desk_instance(2, 3, 2, 77);
  BeamformerSet w;
  w.w = {ComplexVector::Zero(2), ComplexVector::Zero(2)};
  const QosSpec q = QosSpec::uniform_rate(2, 1.5);
  const HomogenizedConstraintData data = homogenize(r, w, q, r.sigma2);
  for (int l = 0; l < 2; ++l) {
    for (int k = 0; k < 2; ++k) {
      CHECK(data.r[l][k].frobenius_norm() == 0.0);
      CHECK(data.b_sq[l][k] == 0.0);
    }
  }
}

TEST_CASE("hand expansion of the N=1 block form") {
  ComplexVector a(1);
  a(0) = 1.0;
  const HomogenizedConstraintData data = single_user_data(a, Complex(1.0, 0.0), 1.0, 1.0);
  ComplexVector vtilde(2);
  vtilde << Complex(1.0, 0.0), Complex(1.0, 0.0);
  const double quad =
      (vtilde.adjoint() * data.r[0][0].matrix() * vtilde)(0, 0).real();
  CHECK(quad + data.b_sq[0][0] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("homogenization identity holds on random unit-modulus vectors") {
  Rng rng(61);
  const ChannelRealization r = test_util::desk_instance(3, 4, 2, 4242);
  BeamformerSet w;
  w.w = {random_vector(3, rng), random_vector(3, rng)};
  const QosSpec q = QosSpec::uniform_rate(2, 1.5);
  const HomogenizedConstraintData data = homogenize(r, w, q, r.sigma2);

  for (int trial = 0; trial < 100; ++trial) {
    const ComplexVector vtilde = random_unit_modulus(5, rng);
    const Complex t = vtilde(4);
    const ComplexVector v = vtilde.head(4) / t;
    for (int l = 0; l < 2; ++l) {
      for (int k = 0; k < 2; ++k) {
        const ComplexVector a =
            r.h_r[l].conjugate().cwiseProduct(r.g * w.w[k]);
        const Complex b = r.h_d[l].dot(w.w[k]);
        const double quad =
            (vtilde.adjoint() * data.r[l][k].matrix() * vtilde)(0, 0).real() +
            data.b_sq[l][k];
        const double direct = constraint_term(v, a, b);
        CHECK(quad == doctest::Approx(direct).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("lifted program has unit-diagonal rows and decoding rows") {
  const ChannelRealization r = test_util::desk_instance(2, 3, 2, 99);
  BeamformerSet w;
  Rng rng(62);
  w.w = {random_vector(2, rng), random_vector(2, rng)};
  const QosSpec q = QosSpec::uniform_rate(2, 1.5);
  const HomogenizedConstraintData data = homogenize(r, w, q, r.sigma2);
  const ConicProgram p = build_phase_program(data, HermitianMatrix::zero(4));
  CHECK(p.block_dims == std::vector<Eigen::Index>{4});
  CHECK(p.constraints.size() == 3 + 4);  // decoding pairs + diagonal entries
  int equalities = 0;
  for (const auto& con : p.constraints) {
    if (con.sense == ConstraintSense::Equal) {
      ++equalities;
      CHECK(con.rhs == 1.0);
    }
  }
  CHECK(equalities == 4);
}

TEST_CASE("constraints met by the direct terms alone certify quickly") {
  // a = 0 and strong b: any unit-diagonal PSD matrix is feasible, so the
  // penalty loop only needs to reach a rank-one point.
  const ComplexVector a = ComplexVector::Zero(2);
  const HomogenizedConstraintData data =
      single_user_data(a, Complex(10.0, 0.0), 1.0, 0.01);
  const PhaseFeasibilityResult result = solve_phase_feasibility(data);
  REQUIRE(result.status == PhaseStatus::RankOneFeasible);
  CHECK(result.phases.size() == 2);
  const double tr = result.v_matrix.trace();
  CHECK((tr - leading_eigpair(result.v_matrix).first) / tr <= 2e-6);
}

TEST_CASE("unattainable floors are reported infeasible") {
  Rng rng(63);
  ComplexVector a = random_vector(2, rng);
  const Complex b(0.5, 0.2);
  // Upper bound of |v^H a + b|^2 over unit-modulus v.
  const double reachable = std::pow(a.cwiseAbs().sum() + std::abs(b), 2.0);
  const double gamma = 1e6 * reachable / 0.01;
  const HomogenizedConstraintData data = single_user_data(a, b, gamma, 0.01);
  const PhaseFeasibilityResult result = solve_phase_feasibility(data);
  CHECK(result.status == PhaseStatus::Infeasible);
}

TEST_CASE("grid-certified two-element instance is solved with feasible phases") {
  // gamma sigma2 = 1.0 while the best alignment reaches (1 + 0.5 + 0.3)^2.
  ComplexVector a(2);
  a << Complex(1.0, 0.0), Complex(0.0, 0.5);
  const Complex b(0.3, 0.0);
  const double gamma = 100.0;
  const double sigma2 = 0.01;
  const HomogenizedConstraintData data = single_user_data(a, b, gamma, sigma2);

  // One-degree grid over (theta_1, theta_2) proves feasibility independently.
  bool grid_feasible = false;
  for (int d1 = 0; d1 < 360 && !grid_feasible; ++d1) {
    for (int d2 = 0; d2 < 360; ++d2) {
      ComplexVector v(2);
      v << std::polar(1.0, -d1 * kPi / 180.0), std::polar(1.0, -d2 * kPi / 180.0);
      if (constraint_term(v, a, b) >= gamma * sigma2) {
        grid_feasible = true;
        break;
      }
    }
  }
  REQUIRE(grid_feasible);

  const PhaseFeasibilityResult result = solve_phase_feasibility(data);
  REQUIRE(result.status == PhaseStatus::RankOneFeasible);
  const ComplexVector v = result.phases.unit_modulus();
  CHECK(constraint_term(v, a, b) >= gamma * sigma2 * (1.0 - 1e-6));
}

TEST_CASE("phase extraction conventions") {
  ComplexVector vtilde(2);
  vtilde << Complex(1.0, 0.0), Complex(1.0, 0.0);
  const PhaseShiftVector trivial = extract_phases(HermitianMatrix::outer(vtilde), 1e-9);
  CHECK(trivial.theta[0] == doctest::Approx(0.0));

  vtilde << std::polar(1.0, kPi / 2.0), Complex(1.0, 0.0);
  const PhaseShiftVector quarter = extract_phases(HermitianMatrix::outer(vtilde), 1e-9);
  CHECK(quarter.theta[0] == doctest::Approx(3.0 * kPi / 2.0));
}

TEST_CASE("extraction round-trips random unit-modulus factors") {
  Rng rng(64);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexVector vtilde = random_unit_modulus(5, rng);
    const PhaseShiftVector phases =
        extract_phases(HermitianMatrix::outer(vtilde), 1e-9);
    // The recovered v must reproduce every quadratic form of the original.
    ComplexVector rebuilt(5);
    rebuilt.head(4) = phases.unit_modulus();
    rebuilt(4) = 1.0;
    const ComplexVector reference = vtilde / vtilde(4);
    CHECK((rebuilt - reference).norm() < 1e-8);
  }
}

TEST_CASE("extraction is invariant to the global phase of the factor") {
  Rng rng(65);
  const ComplexVector vtilde = random_unit_modulus(4, rng);
  const PhaseShiftVector base = extract_phases(HermitianMatrix::outer(vtilde), 1e-9);
  const ComplexVector rotated = std::polar(1.0, 1.2345) * vtilde;
  const PhaseShiftVector other = extract_phases(HermitianMatrix::outer(rotated), 1e-9);
  for (int i = 0; i < base.size(); ++i) {
    CHECK(base.theta[i] == doctest::Approx(other.theta[i]).epsilon(1e-10));
  }
}

TEST_CASE("degenerate homogenization entry is rejected") {
  ComplexVector vtilde(3);
  vtilde << Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(1e-12, 0.0);
  CHECK_THROWS_AS(extract_phases(HermitianMatrix::outer(vtilde), 1e-9),
                  DegenerateFactorError);
}

TEST_CASE("penalty objective is monotone along the loop") {
  Rng rng(66);
  const ChannelRealization r = test_util::desk_instance(3, 4, 2, 31337);
  const QosSpec q = QosSpec::uniform_rate(2, 1.5);
  // Beamformers sized for a concrete phase draw, so that draw itself
  // witnesses feasibility of the lifted phase problem.
  const PhaseShiftVector start = PhaseShiftVector::random(4, rng);
  std::vector<ComplexVector> h;
  for (int l = 0; l < r.users(); ++l) h.push_back(effective_channel(r, start, l));
  const DcResult bf = solve_beamforming(h, q, r.sigma2);
  REQUIRE(bf.status == DcStatus::RankOne);
  const HomogenizedConstraintData data = homogenize(r, bf.beamformers, q, r.sigma2);
  const PhaseFeasibilityResult result = solve_phase_feasibility(data);
  REQUIRE(result.status == PhaseStatus::RankOneFeasible);
  for (std::size_t t = 1; t < result.objective_trajectory.size(); ++t) {
    CHECK(result.objective_trajectory[t] <=
          result.objective_trajectory[t - 1] + 1e-8);
  }

  // Certified phases keep the beamformers feasible on the rebuilt channels.
  std::vector<ComplexVector> rebuilt;
  for (int l = 0; l < r.users(); ++l) {
    rebuilt.push_back(effective_channel(r, result.phases, l));
  }
  CHECK(qos_satisfied(rebuilt, bf.beamformers, q, r.sigma2, 1e-4).satisfied);
}
