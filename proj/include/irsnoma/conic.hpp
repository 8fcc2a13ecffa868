#pragma once

#include <iosfwd>
#include <vector>

#include "irsnoma/linalg.hpp"

namespace irsnoma {

enum class ConstraintSense { LessEqual, Equal, GreaterEqual };

/// One linear constraint sum_i <coeffs[i], X_i> (sense) rhs over all blocks.
/// `coeffs` must hold one Hermitian matrix per block (zero blocks included).
struct LinearConstraint {
  std::vector<HermitianMatrix> coeffs;
  ConstraintSense sense = ConstraintSense::Equal;
  double rhs = 0.0;
};

/// Standard-form program
///   minimize    sum_i <C_i, X_i>
///   subject to  sum_i <A_{j,i}, X_i>  (<=, =, >=)  b_j   for all j
///               X_i PSD
/// with <A, X> = Re tr(A^H X), real by Hermitian symmetry.
struct ConicProgram {
  std::vector<Eigen::Index> block_dims;
  std::vector<HermitianMatrix> objective;
  std::vector<LinearConstraint> constraints;
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations };

struct ConicSolution {
  std::vector<HermitianMatrix> x;
  std::vector<double> duals;  // one multiplier per constraint
  double objective_value = 0.0;
  SolveStatus status = SolveStatus::MaxIterations;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double min_eigenvalue = 0.0;
  int iterations = 0;
};

struct SolverSettings {
  double tol = 1e-7;
  int max_iterations = 50000;
  double infeasibility_tol = 1e-6;
};

/// Opaque warm-start state captured from a previous solve of a program with
/// the same shape. Ignored (cold start) on any dimension mismatch.
struct SolveState {
  Eigen::VectorXd v;
  Eigen::VectorXd lambda;
  double step_rho = 1.0;
};

/// Solves the program with an over-relaxed operator-splitting iteration:
/// a projection onto the affine constraint set (inequalities carried by
/// nonnegative slack scalars) alternating with a PSD projection per block.
/// Optimal means all recomputed KKT residuals fell below settings.tol;
/// Infeasible means the divergence heuristic fired; MaxIterations returns
/// the best iterate reached without either certificate.
ConicSolution solve(const ConicProgram& p, const SolverSettings& settings = {},
                    SolveState* warm = nullptr);

/// KKT residual report, every term recomputed from the program data and the
/// returned primal/dual values (nothing taken from solver internals). All
/// entries are normalized.
struct KktReport {
  double constraint_violation = 0.0;
  double psd_violation = 0.0;
  double dual_cone_violation = 0.0;
  double complementary_slackness = 0.0;
  double duality_gap = 0.0;

  double max_residual() const;
};

KktReport check_kkt(const ConicProgram& p, const ConicSolution& sol);

/// Writes the program in a plain-text form for external cross-checking:
/// a dimensions header, then each matrix as row-major "re im" pairs.
void dump_program(const ConicProgram& p, std::ostream& os);

}  // namespace irsnoma
