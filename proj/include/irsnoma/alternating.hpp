#pragma once

#include <optional>
#include <string>
#include <vector>

#include "irsnoma/channel.hpp"
#include "irsnoma/dc_beamforming.hpp"
#include "irsnoma/dc_phase.hpp"

namespace irsnoma {

enum class Method { AlternatingDC, AlternatingSDR, RandomPhase, NoIrs };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct AlgorithmConfig {
  double epsilon = 1e-3;          // relative power-decrease stopping threshold
  int max_outer_iterations = 30;
  Method method = Method::AlternatingDC;
  DcSettings dc;
  SolverSettings solver;
  int randomization_samples = 100;
  InterferenceModel model = InterferenceModel::PerTermPower;
  QosSpec qos;
};

enum class RunStatus { Converged, PhaseInfeasible, BeamformingInfeasible, Budget };

std::string run_status_name(RunStatus s);

/// Why a phase step ended, recorded per outer iteration.
enum class PhaseStepOutcome {
  NotRun,
  RankOne,              // certified (or factored directly)
  SdpInfeasible,        // lifted feasibility problem infeasible
  RandomizationFailed,  // relaxation solved but no sampled candidate was feasible
  NotCertified          // penalty budget exhausted
};

struct OuterIteration {
  int index = 0;  // 1-based
  double power = 0.0;
  PhaseShiftVector theta;  // phases the beamforming step used
  BeamformerSet beamformers;
  DcStatus bf_status = DcStatus::PenaltyNotZero;
  int bf_iterations = 0;
  double bf_penalty_ratio = 0.0;   // max_k (tr - sigma1)/tr of the lifted blocks
  double bf_factor_residual = 0.0; // max_k ||W - ww^H||_F / ||W||_F
  PhaseStepOutcome phase_outcome = PhaseStepOutcome::NotRun;
  int phase_iterations = 0;
  double phase_penalty_ratio = 0.0;
  double phase_factor_residual = 0.0;
  double wall_ms = 0.0;
};

struct RunTrace {
  std::vector<OuterIteration> iterations;
  RunStatus status = RunStatus::Budget;
  double final_power = 0.0;  // NaN when no feasible solution was reached
  BeamformerSet final_beamformers;
  PhaseShiftVector final_theta;
  bool qos_ok = false;
  double qos_margin = 0.0;
  double wall_ms = 0.0;

  bool has_solution() const { return !final_beamformers.w.empty(); }
  /// True when any rank-one certificate failed along the run.
  bool rank_one_failure() const;
  /// True when a phase step failed because sampling found no feasible
  /// candidate (relaxation-with-randomization runs only).
  bool randomization_failure() const;
};

/// Alternating optimization: penalty-driven beamforming solve, then
/// phase-feasibility solve, until the relative power decrease falls below
/// epsilon, a subproblem turns infeasible, or the budget runs out.
RunTrace optimize(const ChannelRealization& r, const AlgorithmConfig& cfg, Rng& rng);

/// Alternation on the plain relaxations; non-rank-one solutions go through
/// Gaussian randomization (covariance sampling, feasibility restored by a
/// common power rescale for beamformers, unit-modulus projection for
/// phases).
RunTrace sdr_baseline(const ChannelRealization& r, const AlgorithmConfig& cfg, Rng& rng);

/// One uniformly random, fixed phase vector; a single beamforming solve.
RunTrace random_phase_baseline(const ChannelRealization& r, const AlgorithmConfig& cfg,
                               Rng& rng);

/// Reflected path disabled entirely: channels reduce to the direct links.
RunTrace no_irs_baseline(const ChannelRealization& r, const AlgorithmConfig& cfg);

/// Dispatch on cfg.method.
RunTrace run_method(const ChannelRealization& r, const AlgorithmConfig& cfg, Rng& rng);

}  // namespace irsnoma
