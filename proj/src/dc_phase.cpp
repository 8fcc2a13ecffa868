#include "irsnoma/dc_phase.hpp"

#include <cmath>

namespace irsnoma {

HomogenizedConstraintData homogenize(const ChannelRealization& r,
                                     const BeamformerSet& w, const QosSpec& qos,
                                     double sigma2) {
  const int users = r.users();
  if (w.users() != users || qos.users() != users) {
    throw InvalidInputError("homogenize: user count mismatch");
  }
  const int n = r.elements();

  HomogenizedConstraintData data;
  data.elements = n;
  data.gamma_min = qos.gamma_min;
  data.sigma2 = sigma2;
  data.r.resize(static_cast<std::size_t>(users));
  data.b_sq.resize(static_cast<std::size_t>(users));
  for (int l = 0; l < users; ++l) {
    auto& row_r = data.r[static_cast<std::size_t>(l)];
    auto& row_b = data.b_sq[static_cast<std::size_t>(l)];
    row_r.reserve(static_cast<std::size_t>(users));
    row_b.reserve(static_cast<std::size_t>(users));
    const ComplexVector hr_conj = r.h_r[static_cast<std::size_t>(l)].conjugate();
    for (int k = 0; k < users; ++k) {
      const auto& wk = w.w[static_cast<std::size_t>(k)];
      const ComplexVector a = hr_conj.cwiseProduct(r.g * wk);
      const Complex b = r.h_d[static_cast<std::size_t>(l)].dot(wk);
      ComplexMatrix block = ComplexMatrix::Zero(n + 1, n + 1);
      block.topLeftCorner(n, n) = a * a.adjoint();
      block.topRightCorner(n, 1) = a * std::conj(b);
      block.bottomLeftCorner(1, n) = b * a.adjoint();
      row_r.emplace_back(block);
      row_b.push_back(std::norm(b));
    }
  }
  return data;
}

namespace {

constexpr double kMarginCentering = 1e-2;

struct DecodingRow {
  ComplexMatrix coeff;
  double rhs = 0.0;
  double scale_unit = 0.0;  // |rhs| + gamma sigma2 + |b|^2 of the served pair
};

// gamma_k (sum_{j>k} (<R_{l,j}, V> + |b_{l,j}|^2) + sigma2)
//   <= <R_{l,k}, V> + |b_{l,k}|^2
std::vector<DecodingRow> decoding_rows(const HomogenizedConstraintData& data) {
  const int users = data.users();
  std::vector<DecodingRow> rows;
  for (int k = 0; k < users; ++k) {
    const double gamma = data.gamma_min[static_cast<std::size_t>(k)];
    for (int l = k; l < users; ++l) {
      DecodingRow row;
      row.coeff = data.r[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)].matrix();
      row.rhs = gamma * data.sigma2 - data.b_sq[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
      for (int j = k + 1; j < users; ++j) {
        row.coeff -= gamma * data.r[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)].matrix();
        row.rhs += gamma * data.b_sq[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
      }
      row.scale_unit = std::abs(row.rhs) + gamma * data.sigma2 +
                       data.b_sq[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void append_unit_diagonal_rows(ConicProgram& p, Eigen::Index dim, int extra_blocks) {
  for (Eigen::Index i = 0; i < dim; ++i) {
    ComplexMatrix unit = ComplexMatrix::Zero(dim, dim);
    unit(i, i) = 1.0;
    LinearConstraint con;
    con.coeffs.emplace_back(unit);
    for (int b = 0; b < extra_blocks; ++b) con.coeffs.push_back(HermitianMatrix::zero(1));
    con.sense = ConstraintSense::Equal;
    con.rhs = 1.0;
    p.constraints.push_back(std::move(con));
  }
}

}  // namespace

ConicProgram build_phase_program(const HomogenizedConstraintData& data,
                                 const HermitianMatrix& subgradient, double relax,
                                 const std::vector<double>& margins) {
  const Eigen::Index dim = data.elements + 1;
  if (subgradient.dim() != dim) {
    throw InvalidInputError("build_phase_program: subgradient dim mismatch");
  }
  const std::vector<DecodingRow> rows = decoding_rows(data);
  if (!margins.empty() && margins.size() != rows.size()) {
    throw InvalidInputError("build_phase_program: one margin per decoding row");
  }

  ConicProgram p;
  p.block_dims = {dim};
  p.objective.emplace_back(ComplexMatrix::Identity(dim, dim) - subgradient.matrix());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const double margin = margins.empty() ? 0.0 : margins[j];
    LinearConstraint con;
    con.coeffs.emplace_back(rows[j].coeff);
    con.sense = ConstraintSense::GreaterEqual;
    con.rhs = rows[j].rhs + (margin - relax) * rows[j].scale_unit;
    p.constraints.push_back(std::move(con));
  }
  append_unit_diagonal_rows(p, dim, 0);
  return p;
}

ConicProgram build_margin_program(const HomogenizedConstraintData& data,
                                  double relax,
                                  const std::vector<double>& row_weights) {
  const Eigen::Index dim = data.elements + 1;
  const std::vector<DecodingRow> rows = decoding_rows(data);
  const int slacks = static_cast<int>(rows.size());
  if (!row_weights.empty() && row_weights.size() != rows.size()) {
    throw InvalidInputError("build_margin_program: one weight per decoding row");
  }

  // Power sensitivity of row j is weight_j * scale_unit_j; normalize the
  // products so the slack part of the objective is O(1).
  std::vector<double> slack_cost(static_cast<std::size_t>(slacks), 0.0);
  double peak = 0.0;
  for (int j = 0; j < slacks; ++j) {
    const double weight = row_weights.empty()
                              ? 1.0
                              : std::max(0.0, row_weights[static_cast<std::size_t>(j)]);
    slack_cost[static_cast<std::size_t>(j)] =
        weight * rows[static_cast<std::size_t>(j)].scale_unit;
    peak = std::max(peak, slack_cost[static_cast<std::size_t>(j)]);
  }
  for (auto& cost : slack_cost) cost = peak > 0.0 ? cost / peak : 1.0;

  ConicProgram p;
  p.block_dims.assign(1, dim);
  p.block_dims.insert(p.block_dims.end(), static_cast<std::size_t>(slacks), 1);
  // Small centering term: without any objective on V the block's duals are
  // degenerate and the solve crawls.
  p.objective.emplace_back(
      kMarginCentering *
      (ComplexMatrix::Identity(dim, dim) - aligned_phase_subgradient(dim).matrix()));
  for (int j = 0; j < slacks; ++j) {
    p.objective.emplace_back(-slack_cost[static_cast<std::size_t>(j)] *
                             ComplexMatrix::Identity(1, 1));
  }
  for (int j = 0; j < slacks; ++j) {
    LinearConstraint con;
    con.coeffs.emplace_back(rows[static_cast<std::size_t>(j)].coeff);
    for (int i = 0; i < slacks; ++i) {
      con.coeffs.push_back(
          i == j ? HermitianMatrix(-rows[static_cast<std::size_t>(j)].scale_unit *
                                   ComplexMatrix::Identity(1, 1))
                 : HermitianMatrix::zero(1));
    }
    con.sense = ConstraintSense::GreaterEqual;
    con.rhs = rows[static_cast<std::size_t>(j)].rhs -
              relax * rows[static_cast<std::size_t>(j)].scale_unit;
    p.constraints.push_back(std::move(con));
  }
  append_unit_diagonal_rows(p, dim, slacks);
  return p;
}

PhaseShiftVector extract_phases(const HermitianMatrix& v_matrix, double tol) {
  const Eigen::Index dim = v_matrix.dim();
  if (dim < 2) {
    throw InvalidInputError("extract_phases: matrix must be at least 2x2");
  }
  const ComplexVector factor = rank_one_factor(v_matrix, tol);
  const Complex pivot = factor(dim - 1);
  if (std::abs(pivot) < 1e-8) {
    throw DegenerateFactorError("extract_phases: homogenization entry is near zero");
  }
  PhaseShiftVector phases;
  phases.theta.reserve(static_cast<std::size_t>(dim - 1));
  for (Eigen::Index i = 0; i < dim - 1; ++i) {
    const Complex v = factor(i) / pivot;
    if (std::abs(v) < 1e-8) {
      throw DegenerateFactorError("extract_phases: zero factor entry");
    }
    // Unit-modulus projection absorbs the rank-one residual before the
    // angle is read off.
    phases.theta.push_back(wrap_angle(-std::arg(v)));
  }
  return phases;
}

HermitianMatrix aligned_phase_subgradient(Eigen::Index dim) {
  const ComplexVector ones =
      ComplexVector::Constant(dim, Complex(1.0, 0.0)) / std::sqrt(double(dim));
  return HermitianMatrix::outer(ones);
}

namespace {

// Penalty loop over the lifted feasibility set, with decoding rows raised
// by the given margins. Returns true on certification; never reports
// infeasibility (the caller owns that verdict).
bool run_penalty_loop(const HomogenizedConstraintData& data, const DcSettings& dc,
                      const SolverSettings& solver, double relax,
                      const std::vector<double>& margins,
                      HermitianMatrix subgradient, PhaseFeasibilityResult& result) {
  const Eigen::Index dim = data.elements + 1;
  SolveState warm;
  double previous_objective = 0.0;
  for (int t = 1; t <= dc.max_dc_iterations; ++t) {
    const ConicProgram program = build_phase_program(data, subgradient, relax, margins);
    const ConicSolution sol = solve(program, solver, &warm);
    ++result.iterations;
    if (sol.status == SolveStatus::Infeasible) return false;
    const HermitianMatrix& v = sol.x[0];
    const double objective = v.trace() - leading_eigpair(v).first;
    result.objective_trajectory.push_back(objective);
    result.v_matrix = v;

    if (objective <= dc.penalty_tol * dim) {
      result.status = PhaseStatus::RankOneFeasible;
      result.phases = extract_phases(v, 2.0 * dc.penalty_tol);
      return true;
    }
    if (t >= 2 && std::abs(previous_objective - objective) <
                      dc.objective_stall_tol * std::max(1.0, std::abs(objective))) {
      return false;
    }
    previous_objective = objective;
    subgradient = spectral_subgradient(v);
  }
  return false;
}

}  // namespace

PhaseFeasibilityResult solve_phase_feasibility(const HomogenizedConstraintData& data,
                                               const DcSettings& dc,
                                               const SolverSettings& solver,
                                               const std::vector<double>& row_weights,
                                               const PhaseShiftVector* witness) {
  const Eigen::Index dim = data.elements + 1;
  PhaseFeasibilityResult result;

  auto return_witness = [&](PhaseStatus otherwise) {
    if (witness == nullptr || witness->size() != data.elements) {
      result.status = otherwise;
      return result;
    }
    ComplexVector vtilde(dim);
    vtilde.head(dim - 1) = witness->unit_modulus();
    vtilde(dim - 1) = 1.0;
    result.v_matrix = HermitianMatrix::outer(vtilde);
    result.phases = *witness;
    result.status = PhaseStatus::RankOneFeasible;
    return result;
  };

  // The feasible set always contains the phases the beamformers were sized
  // for, sitting on active floors, so bare feasibility is worthless: aim
  // the rank-one search at the weighted max-slack point, so the update
  // helps the next beamforming solve.
  double relax = 0.0;
  ConicSolution margin_sol = solve(build_margin_program(data, 0.0, row_weights), solver);
  if (margin_sol.status == SolveStatus::Infeasible) {
    // Active floors make boundary instances numerically indistinguishable
    // from infeasible ones; retry once with the documented margin.
    relax = kPhaseConstraintRelax;
    margin_sol = solve(build_margin_program(data, relax, row_weights), solver);
  }
  result.iterations = 1;
  if (margin_sol.status == SolveStatus::Infeasible) {
    return return_witness(PhaseStatus::Infeasible);
  }

  std::vector<double> margins;
  HermitianMatrix start = aligned_phase_subgradient(dim);
  double margin_sum = 0.0;
  if (margin_sol.status == SolveStatus::Optimal) {
    for (std::size_t j = 1; j < margin_sol.x.size(); ++j) {
      const double t = std::max(0.0, margin_sol.x[j].matrix()(0, 0).real());
      margins.push_back(kPhaseMarginBackoff * t);
      margin_sum += t;
    }
    start = spectral_subgradient(margin_sol.x[0]);
  }

  if (margin_sum > 0.0 &&
      run_penalty_loop(data, dc, solver, relax, margins, start, result)) {
    return result;
  }
  // A rank-one point may not exist at the backed-off margins; settle for
  // any certified feasible point, restarting from the aligned direction.
  if (run_penalty_loop(data, dc, solver, relax, {},
                       aligned_phase_subgradient(dim), result)) {
    return result;
  }
  return return_witness(PhaseStatus::NotCertified);
}

}  // namespace irsnoma
