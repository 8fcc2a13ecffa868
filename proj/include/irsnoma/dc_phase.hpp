#pragma once

#include <vector>

#include "irsnoma/channel.hpp"
#include "irsnoma/conic.hpp"
#include "irsnoma/dc_beamforming.hpp"
#include "irsnoma/noma.hpp"

namespace irsnoma {

/// Homogenized decoding constraints in the lifted phase variable. For the
/// pair (l, k): a = diag(h_{r,l}^H) G w_k, b = h_{d,l}^H w_k, and
///   r[l][k] = [ a a^H      a conj(b) ]
///             [ b a^H      0         ]
/// so that vtilde^H R vtilde + |b|^2 = |v^H a + b|^2 whenever
/// vtilde = (t v, t) with |t| = 1.
struct HomogenizedConstraintData {
  int elements = 0;  // N; matrices have dimension N + 1
  std::vector<std::vector<HermitianMatrix>> r;  // [l][k]
  std::vector<std::vector<double>> b_sq;        // [l][k] = |b_{l,k}|^2
  std::vector<double> gamma_min;
  double sigma2 = 0.0;

  int users() const { return static_cast<int>(gamma_min.size()); }
};

enum class PhaseStatus { RankOneFeasible, Infeasible, NotCertified };

struct PhaseFeasibilityResult {
  PhaseStatus status = PhaseStatus::NotCertified;
  HermitianMatrix v_matrix;
  PhaseShiftVector phases;  // populated on RankOneFeasible
  std::vector<double> objective_trajectory;  // tr(V) - sigma1(V) per iteration
  int iterations = 0;
};

HomogenizedConstraintData homogenize(const ChannelRealization& r,
                                     const BeamformerSet& w, const QosSpec& qos,
                                     double sigma2);

/// Unit-trace rank-one matrix aligned with the all-ones (zero phase shift)
/// configuration; the canonical linearization point for the lifted phase
/// solves.
HermitianMatrix aligned_phase_subgradient(Eigen::Index dim);

/// Convex subproblem for a fixed spectral-norm subgradient: objective
/// <I - subgradient, V>, unit diagonal, decoding rows, V PSD.
///
/// `relax` lowers every decoding row's right-hand side by that fraction of
/// the row scale |rhs| + gamma sigma2 + |b|^2: the alternating loop hands
/// the phase problem beamformers whose active floors hold only to solver
/// tolerance, and without the margin such boundary instances are
/// numerically indistinguishable from infeasible ones. `margins`, when
/// non-empty (one entry per decoding row, ordered as (k, l) with l >= k),
/// raises each row by that many row-scale units instead.
ConicProgram build_phase_program(const HomogenizedConstraintData& data,
                                 const HermitianMatrix& subgradient,
                                 double relax = 0.0,
                                 const std::vector<double>& margins = {});

/// Slack-maximization companion of the lifted feasibility problem: a
/// 1x1 block t >= 0 per carried decoding row, each such row required to
/// hold with slack t row-scale units, and the weighted slack sum pushed up
/// (plus a small centering term on V that keeps the block's duals
/// non-degenerate). With the beamforming duals as weights, the optimum is
/// the first-order best phase update for the next power solve; its V is
/// what the rank-one loop then aims for. Rows whose weight is negligible
/// against the largest get no slack variable, which keeps the objective
/// well conditioned; `slack_rows`, when given, receives the row index of
/// each slack block in order.
ConicProgram build_margin_program(const HomogenizedConstraintData& data,
                                  double relax = 0.0,
                                  const std::vector<double>& row_weights = {},
                                  std::vector<int>* slack_rows = nullptr);

/// Relative margin used on the infeasibility retry path.
inline constexpr double kPhaseConstraintRelax = 1e-5;

/// Fraction of each achievable row slack kept when searching for a
/// rank-one point.
inline constexpr double kPhaseMarginBackoff = 0.5;

/// Searches for a rank-one feasible lifted phase matrix by driving
/// tr(V) - ||V||_2 to zero, aiming at the weighted max-slack point (see
/// build_margin_program; `row_weights` normally carries the beamforming
/// duals). Infeasible is returned when the slack problem itself is
/// infeasible; NotCertified when the budget runs out with the penalty
/// still above threshold. A caller that already holds a feasible phase
/// vector (the alternating loop always does) may pass it as `witness`:
/// the witness is then returned, rank-one by construction, instead of
/// either failure verdict.
PhaseFeasibilityResult solve_phase_feasibility(const HomogenizedConstraintData& data,
                                               const DcSettings& dc = {},
                                               const SolverSettings& solver = {},
                                               const std::vector<double>& row_weights = {},
                                               const PhaseShiftVector* witness = nullptr);

/// De-homogenizes a certified rank-one lifted matrix into phase shifts:
/// factor vtilde, divide out the last entry, project each entry to unit
/// modulus, and read theta_n = -arg(v_n) wrapped to [0, 2pi).
PhaseShiftVector extract_phases(const HermitianMatrix& v_matrix, double tol);

}  // namespace irsnoma
