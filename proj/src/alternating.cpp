#include "irsnoma/alternating.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace irsnoma {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<ComplexVector> effective_channels(const ChannelRealization& r,
                                              const PhaseShiftVector& theta) {
  std::vector<ComplexVector> h;
  h.reserve(static_cast<std::size_t>(r.users()));
  for (int l = 0; l < r.users(); ++l) h.push_back(effective_channel(r, theta, l));
  return h;
}

struct RankOneCertificate {
  double penalty_ratio = 0.0;
  double factor_residual = 0.0;
};

RankOneCertificate certify(const HermitianMatrix& x) {
  RankOneCertificate cert;
  const double tr = x.trace();
  const double fro = x.frobenius_norm();
  const double sigma1 = leading_eigpair(x).first;
  cert.penalty_ratio = tr > 0.0 ? (tr - sigma1) / tr
                                : std::numeric_limits<double>::infinity();
  // ||X - sigma1 u1 u1^H||_F^2 = ||X||_F^2 - sigma1^2 for PSD X.
  cert.factor_residual =
      fro > 0.0 ? std::sqrt(std::max(0.0, fro * fro - sigma1 * sigma1)) / fro
                : 0.0;
  return cert;
}

RankOneCertificate certify_worst(const std::vector<HermitianMatrix>& blocks) {
  RankOneCertificate worst;
  for (const auto& x : blocks) {
    const RankOneCertificate cert = certify(x);
    worst.penalty_ratio = std::max(worst.penalty_ratio, cert.penalty_ratio);
    worst.factor_residual = std::max(worst.factor_residual, cert.factor_residual);
  }
  return worst;
}

void finalize(RunTrace& trace, const ChannelRealization& r, const AlgorithmConfig& cfg,
              bool no_irs_channels) {
  double best = std::numeric_limits<double>::infinity();
  const OuterIteration* chosen = nullptr;
  for (const auto& record : trace.iterations) {
    if (!record.beamformers.w.empty() && std::isfinite(record.power) &&
        record.power < best) {
      best = record.power;
      chosen = &record;
    }
  }
  if (chosen == nullptr) {
    trace.final_power = kNaN;
    return;
  }
  trace.final_power = chosen->power;
  trace.final_beamformers = chosen->beamformers;
  trace.final_theta = chosen->theta;
  const std::vector<ComplexVector> h =
      no_irs_channels ? r.h_d : effective_channels(r, chosen->theta);
  const QosReport report =
      qos_satisfied(h, chosen->beamformers, cfg.qos, r.sigma2, 1e-4, cfg.model);
  trace.qos_ok = report.satisfied;
  trace.qos_margin = report.worst_margin;
}

std::vector<HermitianMatrix> subgradients_at(const std::vector<HermitianMatrix>& w) {
  std::vector<HermitianMatrix> subs;
  subs.reserve(w.size());
  for (const auto& wk : w) subs.push_back(spectral_subgradient(wk));
  return subs;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::AlternatingDC: return "dc";
    case Method::AlternatingSDR: return "sdr";
    case Method::RandomPhase: return "random_phase";
    case Method::NoIrs: return "no_irs";
  }
  return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "dc") return Method::AlternatingDC;
  if (name == "sdr") return Method::AlternatingSDR;
  if (name == "random_phase") return Method::RandomPhase;
  if (name == "no_irs") return Method::NoIrs;
  return std::nullopt;
}

std::string run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::PhaseInfeasible: return "phase_infeasible";
    case RunStatus::BeamformingInfeasible: return "beamforming_infeasible";
    case RunStatus::Budget: return "budget";
  }
  return "unknown";
}

bool RunTrace::rank_one_failure() const {
  for (const auto& record : iterations) {
    if (record.bf_status == DcStatus::PenaltyNotZero) return true;
    if (record.phase_outcome == PhaseStepOutcome::NotCertified) return true;
  }
  return false;
}

bool RunTrace::randomization_failure() const {
  for (const auto& record : iterations) {
    if (record.phase_outcome == PhaseStepOutcome::RandomizationFailed) return true;
  }
  return false;
}

RunTrace optimize(const ChannelRealization& r, const AlgorithmConfig& cfg, Rng& rng) {
  if (cfg.method != Method::AlternatingDC) {
    throw InvalidInputError("optimize: config method must be the alternating DC method");
  }
  const auto start = Clock::now();
  RunTrace trace;
  PhaseShiftVector theta = PhaseShiftVector::random(r.elements(), rng);
  double prev_power = kNaN;
  std::vector<HermitianMatrix> prev_matrices;

  for (int t1 = 1; t1 <= cfg.max_outer_iterations; ++t1) {
    const auto iter_start = Clock::now();
    const std::vector<ComplexVector> h = effective_channels(r, theta);
    DcResult bf = solve_beamforming(h, cfg.qos, r.sigma2, cfg.dc, cfg.solver);

    // When the relaxation-started loop misses the certificate or lands above
    // the previous power, retry linearized at the previous iterate, whose
    // lifted point is still feasible here and bounds the objective.
    if (!prev_matrices.empty() &&
        (bf.status != DcStatus::RankOne ||
         bf.power > prev_power * (1.0 + 10.0 * cfg.solver.tol))) {
      const std::vector<HermitianMatrix> init = subgradients_at(prev_matrices);
      DcResult retry =
          solve_beamforming(h, cfg.qos, r.sigma2, cfg.dc, cfg.solver, &init);
      if (retry.status == DcStatus::RankOne &&
          (bf.status != DcStatus::RankOne || retry.power < bf.power)) {
        bf = std::move(retry);
      }
    }

    OuterIteration record;
    record.index = t1;
    record.theta = theta;
    record.bf_status = bf.status;
    record.bf_iterations = bf.iterations;

    if (bf.status != DcStatus::RankOne) {
      record.power = kNaN;
      record.wall_ms = ms_since(iter_start);
      trace.iterations.push_back(std::move(record));
      trace.status = bf.status == DcStatus::SubproblemInfeasible
                         ? RunStatus::BeamformingInfeasible
                         : RunStatus::Budget;
      break;
    }

    const bool worse_than_previous =
        std::isfinite(prev_power) &&
        bf.power > prev_power * (1.0 + 10.0 * cfg.solver.tol);
    if (worse_than_previous) {
      // No usable decrease; stop at the previous iterate.
      trace.status = RunStatus::Converged;
      break;
    }

    record.power = bf.power;
    record.beamformers = bf.beamformers;
    const RankOneCertificate cert = certify_worst(bf.matrices);
    record.bf_penalty_ratio = cert.penalty_ratio;
    record.bf_factor_residual = cert.factor_residual;

    const bool converged =
        r.elements() == 0 ||
        (std::isfinite(prev_power) && (prev_power - bf.power) / prev_power < cfg.epsilon);
    if (converged) {
      record.wall_ms = ms_since(iter_start);
      trace.iterations.push_back(std::move(record));
      trace.status = RunStatus::Converged;
      break;
    }
    prev_power = bf.power;
    prev_matrices = bf.matrices;

    const HomogenizedConstraintData data =
        homogenize(r, bf.beamformers, cfg.qos, r.sigma2);
    // The current phases witness feasibility (the beamformers were sized
    // for them), so this step can always hand back a valid configuration.
    const PhaseFeasibilityResult phase =
        solve_phase_feasibility(data, cfg.dc, cfg.solver, bf.qos_duals, &theta);
    record.phase_iterations = phase.iterations;
    if (phase.status == PhaseStatus::RankOneFeasible) {
      record.phase_outcome = PhaseStepOutcome::RankOne;
      const RankOneCertificate vcert = certify(phase.v_matrix);
      record.phase_penalty_ratio = vcert.penalty_ratio;
      record.phase_factor_residual = vcert.factor_residual;
    } else if (phase.status == PhaseStatus::Infeasible) {
      record.phase_outcome = PhaseStepOutcome::SdpInfeasible;
    } else {
      record.phase_outcome = PhaseStepOutcome::NotCertified;
    }
    record.wall_ms = ms_since(iter_start);
    trace.iterations.push_back(std::move(record));

    if (phase.status == PhaseStatus::Infeasible) {
      trace.status = RunStatus::PhaseInfeasible;
      break;
    }
    if (phase.status == PhaseStatus::NotCertified) {
      trace.status = RunStatus::Budget;  // keep the current phases and stop
      break;
    }
    theta = phase.phases;
    if (t1 == cfg.max_outer_iterations) trace.status = RunStatus::Budget;
  }

  finalize(trace, r, cfg, /*no_irs_channels=*/false);
  trace.wall_ms = ms_since(start);
  return trace;
}

namespace {

struct SdrBeamformingStep {
  enum class Outcome { Solved, SdpInfeasible, RandomizationFailed } outcome =
      Outcome::SdpInfeasible;
  BeamformerSet beamformers;
  double power = kNaN;
  bool certified = false;      // relaxation solution was already rank-one
  double penalty_ratio = 0.0;
  int iterations = 0;
};

SdrBeamformingStep sdr_beamforming(const std::vector<ComplexVector>& h,
                                   const AlgorithmConfig& cfg, double sigma2,
                                   Rng& rng) {
  SdrBeamformingStep step;
  const int users = static_cast<int>(h.size());

  double mean_sq = 0.0;
  for (const auto& hl : h) mean_sq += hl.squaredNorm();
  mean_sq /= std::max(users, 1);
  const double scale = mean_sq > 0.0 ? mean_sq : 1.0;
  std::vector<ComplexVector> hn;
  hn.reserve(h.size());
  for (const auto& hl : h) hn.push_back(hl / std::sqrt(scale));

  const std::vector<HermitianMatrix> zero_subs(
      static_cast<std::size_t>(users), HermitianMatrix::zero(h[0].size()));
  const ConicProgram program =
      build_beamforming_program(hn, cfg.qos, sigma2, zero_subs, 0.0);
  const ConicSolution sol = solve(program, cfg.solver);
  step.iterations = 1;
  if (sol.status == SolveStatus::Infeasible) {
    step.outcome = SdrBeamformingStep::Outcome::SdpInfeasible;
    return step;
  }

  step.penalty_ratio = certify_worst(sol.x).penalty_ratio;
  if (step.penalty_ratio <= cfg.dc.penalty_tol) {
    step.certified = true;
    BeamformerSet scaled = extract_beamformers(sol.x, cfg.dc.penalty_tol);
    step.beamformers.w.clear();
    for (const auto& wk : scaled.w) step.beamformers.w.push_back(wk / std::sqrt(scale));
    step.power = 0.0;
    for (const auto& wk : sol.x) step.power += wk.trace() / scale;
    step.outcome = SdrBeamformingStep::Outcome::Solved;
    return step;
  }

  // Gaussian randomization: sample directions from the relaxation
  // covariances, then restore feasibility with one common power factor.
  std::vector<ComplexMatrix> roots;
  roots.reserve(sol.x.size());
  for (const auto& wk : sol.x) {
    const EigenDecomposition eig = hermitian_eig(wk);
    roots.push_back(eig.eigenvectors *
                    eig.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }

  double best_power = std::numeric_limits<double>::infinity();
  BeamformerSet best;
  for (int sample = 0; sample < cfg.randomization_samples; ++sample) {
    BeamformerSet cand;
    cand.w.reserve(static_cast<std::size_t>(users));
    for (int k = 0; k < users; ++k) {
      ComplexVector xi(h[0].size());
      for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.complex_gaussian();
      cand.w.push_back(roots[static_cast<std::size_t>(k)] * xi);
    }
    // gamma_k (c I_{k,l} + sigma2) <= c |h_l^H w_k|^2 pins the smallest
    // feasible common factor c, or rules the candidate out.
    double factor = 0.0;
    bool usable = true;
    for (int k = 0; k < users && usable; ++k) {
      const double gamma = cfg.qos.gamma_min[static_cast<std::size_t>(k)];
      if (gamma <= 0.0) continue;
      for (int l = k; l < users; ++l) {
        const ComplexVector& h_l = hn[static_cast<std::size_t>(l)];
        double coeff = std::norm(h_l.dot(cand.w[static_cast<std::size_t>(k)]));
        for (int j = k + 1; j < users; ++j) {
          coeff -= gamma * std::norm(h_l.dot(cand.w[static_cast<std::size_t>(j)]));
        }
        if (coeff <= 0.0) {
          usable = false;
          break;
        }
        factor = std::max(factor, gamma * sigma2 / coeff);
      }
    }
    if (!usable) continue;
    double cand_power = 0.0;
    for (auto& wk : cand.w) {
      wk *= std::sqrt(factor);
      cand_power += wk.squaredNorm();
    }
    if (cand_power < best_power) {
      best_power = cand_power;
      best = std::move(cand);
    }
  }
  if (!std::isfinite(best_power)) {
    step.outcome = SdrBeamformingStep::Outcome::RandomizationFailed;
    return step;
  }
  step.beamformers.w.clear();
  for (const auto& wk : best.w) step.beamformers.w.push_back(wk / std::sqrt(scale));
  step.power = best_power / scale;
  step.outcome = SdrBeamformingStep::Outcome::Solved;
  return step;
}

struct SdrPhaseStep {
  PhaseStepOutcome outcome = PhaseStepOutcome::SdpInfeasible;
  PhaseShiftVector phases;
  double penalty_ratio = 0.0;
};

SdrPhaseStep sdr_phase(const ChannelRealization& r, const BeamformerSet& w,
                       const AlgorithmConfig& cfg, Rng& rng) {
  SdrPhaseStep step;
  const HomogenizedConstraintData data = homogenize(r, w, cfg.qos, r.sigma2);
  const Eigen::Index dim = data.elements + 1;
  // Pure feasibility has a constant objective on the unit-diagonal set,
  // which leaves the duals degenerate; minimizing against the aligned
  // direction picks one feasible point deterministically.
  const ConicProgram program =
      build_phase_program(data, aligned_phase_subgradient(dim));
  ConicSolution sol = solve(program, cfg.solver);
  if (sol.status == SolveStatus::Infeasible) {
    // Same margin retry as the penalty loop: active floors sit on the
    // boundary of the feasible set.
    sol = solve(build_phase_program(data, aligned_phase_subgradient(dim),
                                    kPhaseConstraintRelax),
                cfg.solver);
  }
  if (sol.status == SolveStatus::Infeasible) {
    step.outcome = PhaseStepOutcome::SdpInfeasible;
    return step;
  }
  const HermitianMatrix& v = sol.x[0];
  step.penalty_ratio = certify(v).penalty_ratio;
  if (step.penalty_ratio <= cfg.dc.penalty_tol) {
    step.phases = extract_phases(v, 2.0 * cfg.dc.penalty_tol);
    step.outcome = PhaseStepOutcome::RankOne;
    return step;
  }

  const EigenDecomposition eig = hermitian_eig(v);
  const ComplexMatrix root =
      eig.eigenvectors * eig.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  double best_margin = -std::numeric_limits<double>::infinity();
  for (int sample = 0; sample < cfg.randomization_samples; ++sample) {
    ComplexVector xi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) xi(i) = rng.complex_gaussian();
    const ComplexVector raw = root * xi;
    const Complex pivot = std::abs(raw(dim - 1)) > 0.0
                              ? raw(dim - 1) / std::abs(raw(dim - 1))
                              : Complex(1.0, 0.0);
    PhaseShiftVector cand;
    cand.theta.reserve(static_cast<std::size_t>(data.elements));
    for (Eigen::Index i = 0; i < dim - 1; ++i) {
      const Complex entry =
          std::abs(raw(i)) > 0.0 ? raw(i) / std::abs(raw(i)) : Complex(1.0, 0.0);
      cand.theta.push_back(wrap_angle(-std::arg(entry / pivot)));
    }
    const std::vector<ComplexVector> h = effective_channels(r, cand);
    const QosReport report =
        qos_satisfied(h, w, cfg.qos, r.sigma2, 0.0, cfg.model);
    if (report.satisfied && report.worst_margin > best_margin) {
      best_margin = report.worst_margin;
      step.phases = std::move(cand);
    }
  }
  if (std::isfinite(best_margin) && best_margin >= 0.0) {
    step.outcome = PhaseStepOutcome::RankOne;
    step.penalty_ratio = 0.0;  // candidate is exactly unit-modulus
  } else {
    step.outcome = PhaseStepOutcome::RandomizationFailed;
  }
  return step;
}

}  // namespace

RunTrace sdr_baseline(const ChannelRealization& r, const AlgorithmConfig& cfg, Rng& rng) {
  if (cfg.method != Method::AlternatingSDR) {
    throw InvalidInputError("sdr_baseline: config method must be the alternating SDR method");
  }
  const auto start = Clock::now();
  RunTrace trace;
  PhaseShiftVector theta = PhaseShiftVector::random(r.elements(), rng);
  double prev_power = kNaN;

  for (int t1 = 1; t1 <= cfg.max_outer_iterations; ++t1) {
    const auto iter_start = Clock::now();
    const std::vector<ComplexVector> h = effective_channels(r, theta);
    const SdrBeamformingStep bf = sdr_beamforming(h, cfg, r.sigma2, rng);

    OuterIteration record;
    record.index = t1;
    record.theta = theta;
    record.bf_iterations = bf.iterations;
    record.bf_penalty_ratio = bf.penalty_ratio;
    record.bf_status = bf.certified ? DcStatus::RankOne
                       : bf.outcome == SdrBeamformingStep::Outcome::Solved
                           ? DcStatus::PenaltyNotZero
                           : DcStatus::SubproblemInfeasible;

    if (bf.outcome != SdrBeamformingStep::Outcome::Solved) {
      record.power = kNaN;
      record.wall_ms = ms_since(iter_start);
      trace.iterations.push_back(std::move(record));
      trace.status = RunStatus::BeamformingInfeasible;
      break;
    }
    record.power = bf.power;
    record.beamformers = bf.beamformers;

    const bool converged =
        r.elements() == 0 ||
        (std::isfinite(prev_power) && (prev_power - bf.power) / prev_power < cfg.epsilon);
    if (converged) {
      record.wall_ms = ms_since(iter_start);
      trace.iterations.push_back(std::move(record));
      trace.status = RunStatus::Converged;
      break;
    }
    prev_power = bf.power;

    const SdrPhaseStep phase = sdr_phase(r, bf.beamformers, cfg, rng);
    record.phase_outcome = phase.outcome;
    record.phase_penalty_ratio = phase.penalty_ratio;
    record.phase_iterations = 1;
    record.wall_ms = ms_since(iter_start);
    trace.iterations.push_back(std::move(record));

    if (phase.outcome != PhaseStepOutcome::RankOne) {
      trace.status = RunStatus::PhaseInfeasible;
      break;
    }
    theta = phase.phases;
    if (t1 == cfg.max_outer_iterations) trace.status = RunStatus::Budget;
  }

  finalize(trace, r, cfg, /*no_irs_channels=*/false);
  trace.wall_ms = ms_since(start);
  return trace;
}

namespace {

RunTrace single_beamforming_run(const ChannelRealization& r, const AlgorithmConfig& cfg,
                                const PhaseShiftVector& theta, bool no_irs_channels) {
  const auto start = Clock::now();
  RunTrace trace;
  const std::vector<ComplexVector> h =
      no_irs_channels ? r.h_d : effective_channels(r, theta);
  const DcResult bf = solve_beamforming(h, cfg.qos, r.sigma2, cfg.dc, cfg.solver);

  OuterIteration record;
  record.index = 1;
  record.theta = theta;
  record.bf_status = bf.status;
  record.bf_iterations = bf.iterations;
  if (bf.status == DcStatus::RankOne) {
    record.power = bf.power;
    record.beamformers = bf.beamformers;
    const RankOneCertificate cert = certify_worst(bf.matrices);
    record.bf_penalty_ratio = cert.penalty_ratio;
    record.bf_factor_residual = cert.factor_residual;
    trace.status = RunStatus::Converged;
  } else {
    record.power = kNaN;
    trace.status = bf.status == DcStatus::SubproblemInfeasible
                       ? RunStatus::BeamformingInfeasible
                       : RunStatus::Budget;
  }
  record.wall_ms = ms_since(start);
  trace.iterations.push_back(std::move(record));
  finalize(trace, r, cfg, no_irs_channels);
  trace.wall_ms = ms_since(start);
  return trace;
}

}  // namespace

RunTrace random_phase_baseline(const ChannelRealization& r, const AlgorithmConfig& cfg,
                               Rng& rng) {
  const PhaseShiftVector theta = PhaseShiftVector::random(r.elements(), rng);
  return single_beamforming_run(r, cfg, theta, /*no_irs_channels=*/false);
}

RunTrace no_irs_baseline(const ChannelRealization& r, const AlgorithmConfig& cfg) {
  // The surface is absent, not merely set to zero phases: the reflected
  // path is removed and only the direct links remain.
  return single_beamforming_run(r, cfg, PhaseShiftVector{}, /*no_irs_channels=*/true);
}

RunTrace run_method(const ChannelRealization& r, const AlgorithmConfig& cfg, Rng& rng) {
  switch (cfg.method) {
    case Method::AlternatingDC: return optimize(r, cfg, rng);
    case Method::AlternatingSDR: return sdr_baseline(r, cfg, rng);
    case Method::RandomPhase: return random_phase_baseline(r, cfg, rng);
    case Method::NoIrs: return no_irs_baseline(r, cfg);
  }
  throw InvalidInputError("run_method: unknown method");
}

}  // namespace irsnoma
