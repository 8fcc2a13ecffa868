#include "irsnoma/dc_beamforming.hpp"

#include <cmath>

namespace irsnoma {

ConicProgram build_beamforming_program(const std::vector<ComplexVector>& h,
                                       const QosSpec& qos, double sigma2,
                                       const std::vector<HermitianMatrix>& subgradients,
                                       double rho) {
  const int users = static_cast<int>(h.size());
  if (users < 1 || qos.users() != users ||
      static_cast<int>(subgradients.size()) != users) {
    throw InvalidInputError("build_beamforming_program: size mismatch");
  }
  const Eigen::Index antennas = h[0].size();
  for (const auto& hl : h) {
    if (hl.size() != antennas) {
      throw InvalidInputError("build_beamforming_program: channel dims differ");
    }
  }
  for (const auto& sub : subgradients) {
    if (sub.dim() != antennas) {
      throw InvalidInputError("build_beamforming_program: subgradient dim mismatch");
    }
    if (sub.trace() > 1.0 + 1e-9 ||
        (sub.trace() > 0.0 && hermitian_eig(sub).eigenvalues.minCoeff() < -1e-9)) {
      throw InvalidInputError("build_beamforming_program: subgradient must be PSD with trace <= 1");
    }
  }

  ConicProgram p;
  p.block_dims.assign(static_cast<std::size_t>(users), antennas);
  p.objective.reserve(static_cast<std::size_t>(users));
  const ComplexMatrix eye = ComplexMatrix::Identity(antennas, antennas);
  for (int k = 0; k < users; ++k) {
    p.objective.emplace_back(
        (1.0 + rho) * eye - rho * subgradients[static_cast<std::size_t>(k)].matrix());
  }

  std::vector<HermitianMatrix> channel_outer;
  channel_outer.reserve(static_cast<std::size_t>(users));
  for (const auto& hl : h) channel_outer.push_back(HermitianMatrix::outer(hl));

  // gamma_k (sum_{j>k} <H_l, W_j> + sigma2) <= <H_l, W_k>, all k, l = k..K-1.
  for (int k = 0; k < users; ++k) {
    const double gamma = qos.gamma_min[static_cast<std::size_t>(k)];
    for (int l = k; l < users; ++l) {
      LinearConstraint con;
      con.coeffs.assign(static_cast<std::size_t>(users), HermitianMatrix::zero(antennas));
      const auto& h_outer = channel_outer[static_cast<std::size_t>(l)];
      con.coeffs[static_cast<std::size_t>(k)] = h_outer;
      for (int j = k + 1; j < users; ++j) {
        con.coeffs[static_cast<std::size_t>(j)] =
            HermitianMatrix(-gamma * h_outer.matrix());
      }
      con.sense = ConstraintSense::GreaterEqual;
      con.rhs = gamma * sigma2;
      p.constraints.push_back(std::move(con));
    }
  }
  return p;
}

BeamformerSet extract_beamformers(const std::vector<HermitianMatrix>& matrices,
                                  double tol) {
  BeamformerSet set;
  set.w.reserve(matrices.size());
  double trace_sum = 0.0;
  double power = 0.0;
  for (const auto& wk : matrices) {
    set.w.push_back(rank_one_factor(wk, tol));
    trace_sum += wk.trace();
    power += set.w.back().squaredNorm();
  }
  if (std::abs(power - trace_sum) > tol * std::max(1.0, trace_sum)) {
    throw NotRankOneError("extract_beamformers: factorization lost power");
  }
  return set;
}

DcResult solve_beamforming(const std::vector<ComplexVector>& h, const QosSpec& qos,
                           double sigma2, const DcSettings& dc,
                           const SolverSettings& solver,
                           const std::vector<HermitianMatrix>* initial_subgradients) {
  const int users = static_cast<int>(h.size());
  const Eigen::Index antennas = users > 0 ? h[0].size() : 0;

  // Channels are rescaled to unit mean square norm so the lifted program is
  // well conditioned regardless of path loss; powers scale back by 1/s.
  double mean_sq = 0.0;
  for (const auto& hl : h) mean_sq += hl.squaredNorm();
  mean_sq /= std::max(users, 1);
  const double scale = mean_sq > 0.0 ? mean_sq : 1.0;
  std::vector<ComplexVector> hn;
  hn.reserve(h.size());
  for (const auto& hl : h) hn.push_back(hl / std::sqrt(scale));

  std::vector<HermitianMatrix> subgradients;
  if (initial_subgradients != nullptr) {
    subgradients = *initial_subgradients;
  } else {
    subgradients.assign(static_cast<std::size_t>(users),
                        HermitianMatrix::zero(antennas));
  }

  DcResult result;
  SolveState warm;
  double previous_surrogate = 0.0;
  for (int t = 1; t <= dc.max_dc_iterations; ++t) {
    const ConicProgram program =
        build_beamforming_program(hn, qos, sigma2, subgradients, dc.rho);
    const ConicSolution sol = solve(program, solver, &warm);
    result.iterations = t;
    if (sol.status == SolveStatus::Infeasible) {
      result.status = DcStatus::SubproblemInfeasible;
      return result;
    }

    result.matrices.clear();
    result.qos_duals = sol.duals;
    double penalty = 0.0;
    bool certified = true;
    for (const auto& wk : sol.x) {
      const double tr = wk.trace();
      const double sigma1 = leading_eigpair(wk).first;
      penalty += tr - sigma1;
      if (!(tr > 0.0) || tr - sigma1 > dc.penalty_tol * tr) certified = false;
      result.matrices.emplace_back(wk.matrix() / scale);
    }
    result.penalty_trajectory.push_back(penalty / scale);
    result.surrogate_trajectory.push_back(sol.objective_value / scale);

    if (certified) {
      result.status = DcStatus::RankOne;
      BeamformerSet scaled = extract_beamformers(sol.x, dc.penalty_tol);
      result.beamformers.w.clear();
      for (const auto& wk : scaled.w) {
        result.beamformers.w.push_back(wk / std::sqrt(scale));
      }
      result.power = 0.0;
      for (const auto& wk : result.matrices) result.power += wk.trace();
      result.qos = qos_satisfied(h, result.beamformers, qos, sigma2);
      return result;
    }

    if (t >= 2 && std::abs(previous_surrogate - sol.objective_value) <
                      dc.objective_stall_tol * std::max(1.0, std::abs(sol.objective_value))) {
      break;
    }
    previous_surrogate = sol.objective_value;
    for (int k = 0; k < users; ++k) {
      subgradients[static_cast<std::size_t>(k)] =
          spectral_subgradient(sol.x[static_cast<std::size_t>(k)]);
    }
  }
  result.status = DcStatus::PenaltyNotZero;
  return result;
}

}  // namespace irsnoma
