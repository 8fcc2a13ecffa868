#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irsnoma/dc_beamforming.hpp"
#include "test_util.hpp"

using namespace irsnoma;
using test_util::random_vector;

namespace {

std::vector<HermitianMatrix> zero_subgradients(int users, int antennas) {
  return std::vector<HermitianMatrix>(static_cast<std::size_t>(users),
                                      HermitianMatrix::zero(antennas));
}

}  // namespace

TEST_CASE("single-user program has one constraint") {
  ComplexVector h(2);
  h << Complex(1.0, 0.0), Complex(0.0, 1.0);
  const QosSpec q = QosSpec::uniform_rate(1, 1.0);
  const ConicProgram p =
      build_beamforming_program({h}, q, 0.25, zero_subgradients(1, 2), 20.0);
  REQUIRE(p.constraints.size() == 1);
  CHECK(p.constraints[0].sense == ConstraintSense::GreaterEqual);
  CHECK(p.constraints[0].rhs == doctest::Approx(q.gamma_min[0] * 0.25));
  CHECK((p.constraints[0].coeffs[0].matrix() - h * h.adjoint()).norm() < 1e-12);
}

TEST_CASE("zero subgradients reduce the objective to a scaled trace") {
  Rng rng(51);
  const std::vector<ComplexVector> h = {random_vector(3, rng), random_vector(3, rng)};
  const QosSpec q = QosSpec::uniform_rate(2, 1.5);
  const double rho = 20.0;
  const ConicProgram p =
      build_beamforming_program(h, q, 0.01, zero_subgradients(2, 3), rho);
  for (const auto& c : p.objective) {
    CHECK((c.matrix() - (1.0 + rho) * ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
  }
}

TEST_CASE("constraint rows enumerate decoding pairs (k, l) with l >= k") {
  Rng rng(52);
  const std::vector<ComplexVector> h = {random_vector(2, rng), random_vector(2, rng)};
  const QosSpec q = QosSpec::uniform_rate(2, 1.5);
  const ConicProgram p =
      build_beamforming_program(h, q, 0.01, zero_subgradients(2, 2), 20.0);
  // Direct enumeration: k=0 -> l in {0,1}; k=1 -> l in {1}.
  int expected = 0;
  for (int k = 0; k < 2; ++k) {
    for (int l = k; l < 2; ++l) ++expected;
  }
  CHECK(expected == 3);
  CHECK(static_cast<int>(p.constraints.size()) == expected);

  // Interferer coefficient carries the -gamma factor.
  const auto& first = p.constraints[0];
  CHECK((first.coeffs[1].matrix() + q.gamma_min[0] * first.coeffs[0].matrix()).norm() <
        1e-12);
}

TEST_CASE("subgradient preconditions are enforced") {
  Rng rng(53);
  const std::vector<ComplexVector> h = {random_vector(2, rng)};
  const QosSpec q = QosSpec::uniform_rate(1, 1.0);
  std::vector<HermitianMatrix> bad = {HermitianMatrix(2.0 * ComplexMatrix::Identity(2, 2))};
  CHECK_THROWS_AS(build_beamforming_program(h, q, 0.01, bad, 20.0), InvalidInputError);
  std::vector<HermitianMatrix> mismatched = {HermitianMatrix::zero(3)};
  CHECK_THROWS_AS(build_beamforming_program(h, q, 0.01, mismatched, 20.0),
                  InvalidInputError);
}

TEST_CASE("single user, single antenna closed form") {
  ComplexVector h(1);
  h(0) = 1.0;
  const QosSpec q = QosSpec::uniform_rate(1, 1.0);  // gamma = 1
  const DcResult result = solve_beamforming({h}, q, 1.0);
  REQUIRE(result.status == DcStatus::RankOne);
  CHECK(result.power == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(std::abs(result.beamformers.w[0](0)) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("single user matched filter over two antennas") {
  ComplexVector h(2);
  h << Complex(1.0 / std::sqrt(2.0), 0.0), Complex(1.0 / std::sqrt(2.0), 0.0);
  QosSpec q;
  q.r_min = {std::log2(3.0)};  // gamma = 2
  q.gamma_min = {2.0};
  const DcResult result = solve_beamforming({h}, q, 0.01);
  REQUIRE(result.status == DcStatus::RankOne);
  CHECK(result.power == doctest::Approx(0.02).epsilon(1e-5));
}

TEST_CASE("zero channel with a positive floor is infeasible") {
  const std::vector<ComplexVector> h = {ComplexVector::Zero(2)};
  const QosSpec q = QosSpec::uniform_rate(1, 1.0);
  const DcResult result = solve_beamforming(h, q, 0.01);
  CHECK(result.status == DcStatus::SubproblemInfeasible);
}

TEST_CASE("two-user instance certifies rank one and meets the floors") {
  Rng rng(54);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<ComplexVector> h = {random_vector(2, rng), random_vector(2, rng)};
    const QosSpec q = QosSpec::uniform_rate(2, 1.0);
    const DcSettings dc;
    const SolverSettings solver;
    const DcResult result = solve_beamforming(h, q, 0.01, dc, solver);
    REQUIRE(result.status == DcStatus::RankOne);
    CHECK(result.qos.satisfied);

    // Certified blocks pass the per-matrix certificate.
    for (const auto& wk : result.matrices) {
      const double tr = wk.trace();
      CHECK((tr - leading_eigpair(wk).first) / tr <= dc.penalty_tol * 1.01);
    }
    // Power bookkeeping: sum of traces equals the reported power.
    double trace_sum = 0.0;
    for (const auto& wk : result.matrices) trace_sum += wk.trace();
    CHECK(result.power == doctest::Approx(trace_sum).epsilon(1e-8));

    // Surrogate values never increase along the penalty loop.
    for (std::size_t t = 1; t < result.surrogate_trajectory.size(); ++t) {
      CHECK(result.surrogate_trajectory[t] <=
            result.surrogate_trajectory[t - 1] +
                1e-9 * std::max(1.0, std::abs(result.surrogate_trajectory[t - 1])));
    }
    // Penalty decreases after the first iteration.
    for (std::size_t t = 2; t < result.penalty_trajectory.size(); ++t) {
      CHECK(result.penalty_trajectory[t] <= result.penalty_trajectory[t - 1] + 1e-8);
    }

    // The relaxation value bounds the certified power from below.
    const ConicProgram relaxed =
        build_beamforming_program(h, q, 0.01, zero_subgradients(2, 2), 0.0);
    const ConicSolution sdr = solve(relaxed, solver);
    REQUIRE(sdr.status == SolveStatus::Optimal);
    CHECK(sdr.objective_value <=
          result.power + 10.0 * solver.tol * std::max(1.0, result.power));

    // Recovered beamformers satisfy the decoding floors with slack 1e-4.
    CHECK(qos_satisfied(h, result.beamformers, q, 0.01, 1e-4).satisfied);
  }
}

TEST_CASE("extraction preserves power and rejects non-rank-one input") {
  Rng rng(55);
  const ComplexVector w0 = random_vector(3, rng);
  const ComplexVector w1 = random_vector(3, rng);
  const std::vector<HermitianMatrix> exact = {HermitianMatrix::outer(w0),
                                              HermitianMatrix::outer(w1)};
  const BeamformerSet set = extract_beamformers(exact, 1e-8);
  CHECK(total_power(set) ==
        doctest::Approx(w0.squaredNorm() + w1.squaredNorm()).epsilon(1e-10));

  const std::vector<HermitianMatrix> bad = {HermitianMatrix::identity(3)};
  CHECK_THROWS_AS(extract_beamformers(bad, 1e-6), NotRankOneError);
}

TEST_CASE("realistic desk channels solve at true scale") {
  const ChannelRealization r = test_util::desk_instance(3, 0, 3, 1234);
  const QosSpec q = QosSpec::uniform_rate(3, 1.5);
  const DcResult result = solve_beamforming(r.h_d, q, r.sigma2);
  REQUIRE(result.status == DcStatus::RankOne);
  CHECK(result.qos.satisfied);
  CHECK(result.power > 0.0);
  CHECK(qos_satisfied(r.h_d, result.beamformers, q, r.sigma2, 1e-4).satisfied);
}
