#pragma once

#include <vector>

#include "irsnoma/conic.hpp"
#include "irsnoma/noma.hpp"

namespace irsnoma {

/// Penalty-loop controls shared by the beamforming and phase solvers.
struct DcSettings {
  double rho = 20.0;                  // trace-minus-spectral-norm penalty weight
  int max_dc_iterations = 50;
  double penalty_tol = 1e-6;          // relative rank-one certificate
  double objective_stall_tol = 1e-8;  // relative surrogate improvement floor
};

enum class DcStatus { RankOne, PenaltyNotZero, SubproblemInfeasible };

struct DcResult {
  std::vector<HermitianMatrix> matrices;  // lifted W_k
  BeamformerSet beamformers;              // populated on RankOne
  double power = 0.0;                     // sum of traces on RankOne
  std::vector<double> penalty_trajectory; // sum_k (tr - sigma1) per iteration
  std::vector<double> surrogate_trajectory;  // linearized objective values
  int iterations = 0;
  DcStatus status = DcStatus::PenaltyNotZero;
  QosReport qos;  // post-extraction verification, RankOne only
  /// Multipliers of the decoding rows from the last subproblem, ordered as
  /// (k, l) with l >= k; the power sensitivity to relaxing each floor.
  std::vector<double> qos_duals;
};

/// Lifted convex subproblem for fixed per-block spectral-norm subgradients:
/// objective (1 + rho) I - rho subgradient_k per block, one decoding
/// constraint per pair (k, l) with l >= k, all blocks PSD.
ConicProgram build_beamforming_program(const std::vector<ComplexVector>& h,
                                       const QosSpec& qos, double sigma2,
                                       const std::vector<HermitianMatrix>& subgradients,
                                       double rho);

/// Minimizes total transmit power subject to the decoding floors by
/// iterating build_beamforming_program with refreshed subgradients until
/// every block passes the rank-one certificate. The first pass uses zero
/// subgradients, i.e. starts from the plain relaxation; pass
/// `initial_subgradients` to linearize around a known point instead.
DcResult solve_beamforming(const std::vector<ComplexVector>& h, const QosSpec& qos,
                           double sigma2, const DcSettings& dc = {},
                           const SolverSettings& solver = {},
                           const std::vector<HermitianMatrix>* initial_subgradients = nullptr);

/// Rank-one factors of certified lifted matrices; total power is preserved
/// to within tol relative.
BeamformerSet extract_beamformers(const std::vector<HermitianMatrix>& matrices,
                                  double tol);

}  // namespace irsnoma
