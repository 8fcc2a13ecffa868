#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irsnoma/alternating.hpp"
#include "test_util.hpp"

using namespace irsnoma;

namespace {

AlgorithmConfig config_for(Method method, int users, double rate = 1.5) {
  AlgorithmConfig cfg;
  cfg.method = method;
  cfg.qos = QosSpec::uniform_rate(users, rate);
  return cfg;
}

}  // namespace

TEST_CASE("no reflecting elements collapse to one beamforming solve") {
  const ChannelRealization r = test_util::desk_instance(3, 0, 2, 1001);
  const AlgorithmConfig cfg = config_for(Method::AlternatingDC, 2);
  Rng rng(1);
  const RunTrace trace = optimize(r, cfg, rng);
  CHECK(trace.status == RunStatus::Converged);
  CHECK(trace.iterations.size() == 1);
  CHECK(trace.qos_ok);

  // With no elements the random-phase and surface-free runs coincide.
  Rng rng2(2);
  const RunTrace random_trace =
      random_phase_baseline(r, config_for(Method::RandomPhase, 2), rng2);
  const RunTrace no_irs_trace = no_irs_baseline(r, config_for(Method::NoIrs, 2));
  CHECK(random_trace.final_power ==
        doctest::Approx(no_irs_trace.final_power).epsilon(1e-9));
}

TEST_CASE("alternating run is monotone, feasible and deterministic") {
  const ChannelRealization r = test_util::desk_instance(2, 4, 2, 2002);
  const AlgorithmConfig cfg = config_for(Method::AlternatingDC, 2);

  Rng rng_a(7);
  const RunTrace a = optimize(r, cfg, rng_a);
  REQUIRE(a.status == RunStatus::Converged);
  CHECK(a.qos_ok);
  CHECK(static_cast<int>(a.iterations.size()) <= cfg.max_outer_iterations);
  for (std::size_t t = 1; t < a.iterations.size(); ++t) {
    CHECK(a.iterations[t].power <=
          a.iterations[t - 1].power * (1.0 + 10.0 * cfg.solver.tol));
  }

  Rng rng_b(7);
  const RunTrace b = optimize(r, cfg, rng_b);
  REQUIRE(a.iterations.size() == b.iterations.size());
  for (std::size_t t = 0; t < a.iterations.size(); ++t) {
    CHECK(a.iterations[t].power == b.iterations[t].power);
  }
  CHECK(a.final_power == b.final_power);
}

TEST_CASE("converged runs improve on their first iteration") {
  const ChannelRealization r = test_util::desk_instance(3, 6, 3, 3003);
  const AlgorithmConfig cfg = config_for(Method::AlternatingDC, 3);
  Rng rng(11);
  const RunTrace trace = optimize(r, cfg, rng);
  REQUIRE(trace.status == RunStatus::Converged);
  REQUIRE(trace.iterations.size() >= 2);
  CHECK(trace.final_power <= trace.iterations.front().power);
  CHECK(trace.qos_ok);
}

TEST_CASE("surface-free baseline ignores the reflected channels") {
  ChannelRealization r = test_util::desk_instance(2, 5, 2, 4004);
  const AlgorithmConfig cfg = config_for(Method::NoIrs, 2);
  const RunTrace base = no_irs_baseline(r, cfg);
  ChannelRealization perturbed = r;
  Rng rng(12);
  for (auto& h : perturbed.h_r) h = test_util::random_vector(5, rng);
  perturbed.g = test_util::random_matrix(5, 2, rng);
  const RunTrace other = no_irs_baseline(perturbed, cfg);
  CHECK(base.final_power == doctest::Approx(other.final_power).epsilon(1e-12));
}

TEST_CASE("zero surface-to-user link makes alternation match the surface-free run") {
  ChannelRealization r = test_util::desk_instance(2, 3, 2, 5005);
  r.g.setZero();
  const RunTrace dc = [&] {
    Rng rng(13);
    return optimize(r, config_for(Method::AlternatingDC, 2), rng);
  }();
  const RunTrace no_irs = no_irs_baseline(r, config_for(Method::NoIrs, 2));
  REQUIRE(dc.status == RunStatus::Converged);
  CHECK(dc.final_power == doctest::Approx(no_irs.final_power).epsilon(1e-6));
}

TEST_CASE("random phase baseline is deterministic in its seed") {
  const ChannelRealization r = test_util::desk_instance(3, 4, 2, 6006);
  const AlgorithmConfig cfg = config_for(Method::RandomPhase, 2);
  Rng rng_a(21), rng_b(21), rng_c(22);
  const RunTrace a = random_phase_baseline(r, cfg, rng_a);
  const RunTrace b = random_phase_baseline(r, cfg, rng_b);
  const RunTrace c = random_phase_baseline(r, cfg, rng_c);
  CHECK(a.final_power == b.final_power);
  CHECK(a.final_power != c.final_power);
  CHECK(a.iterations.size() == 1);
}

TEST_CASE("relaxation baseline factors rank-one solutions directly") {
  // Single user: the relaxation optimum is rank one, so no sampling runs.
  const ChannelRealization r = test_util::desk_instance(3, 4, 1, 7007);
  AlgorithmConfig cfg = config_for(Method::AlternatingSDR, 1);
  cfg.randomization_samples = 0;  // would fail immediately if sampling were needed
  Rng rng(31);
  const RunTrace trace = sdr_baseline(r, cfg, rng);
  CHECK(trace.has_solution());
  for (const auto& it : trace.iterations) {
    if (std::isfinite(it.power)) CHECK(it.bf_status == DcStatus::RankOne);
  }
}

TEST_CASE("zero sampling budget fails the phase step on non-rank-one solutions") {
  const ChannelRealization r = test_util::desk_instance(2, 6, 2, 8008);
  AlgorithmConfig cfg = config_for(Method::AlternatingSDR, 2);
  cfg.randomization_samples = 0;
  Rng rng(32);
  const RunTrace trace = sdr_baseline(r, cfg, rng);
  // Either the lifted phase matrix came out rank one (unlikely at N=6) or
  // the run must stop with a failed randomization.
  if (trace.status == RunStatus::PhaseInfeasible) {
    CHECK(trace.randomization_failure());
  } else {
    for (const auto& it : trace.iterations) {
      if (it.phase_outcome == PhaseStepOutcome::RankOne) {
        CHECK(it.phase_penalty_ratio <= cfg.dc.penalty_tol);
      }
    }
  }
}

TEST_CASE("outer budget of one iteration reports budget status") {
  const ChannelRealization r = test_util::desk_instance(2, 4, 2, 9009);
  AlgorithmConfig cfg = config_for(Method::AlternatingDC, 2);
  cfg.max_outer_iterations = 1;
  Rng rng(41);
  const RunTrace trace = optimize(r, cfg, rng);
  CHECK(trace.status == RunStatus::Budget);
  CHECK(trace.has_solution());  // the single beamforming solve still counts
}

TEST_CASE("a dead direct link with a positive floor is beamforming-infeasible") {
  ChannelRealization r = test_util::desk_instance(2, 0, 2, 1010);
  r.h_d[0].setZero();  // user 0 cannot receive anything
  const AlgorithmConfig cfg = config_for(Method::AlternatingDC, 2);
  Rng rng(51);
  const RunTrace trace = optimize(r, cfg, rng);
  CHECK(trace.status == RunStatus::BeamformingInfeasible);
  CHECK_FALSE(trace.has_solution());
  CHECK(std::isnan(trace.final_power));
}
