#include "irsnoma/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace irsnoma {

namespace {

// Splitting-iteration constants. Residuals are checked on a fixed cadence;
// the step size is rebalanced from the internal primal/dual residual ratio;
// infeasibility is declared only after several consecutive windows that
// combine residual stagnation with unbounded dual growth.
constexpr double kOverRelaxation = 1.6;
constexpr int kCheckEvery = 25;
constexpr int kAdaptEvery = 100;
constexpr double kAdaptRatio = 10.0;
constexpr double kAdaptFactor = 2.0;
constexpr double kStepRhoMin = 1e-4;
constexpr double kStepRhoMax = 1e6;
constexpr int kInfeasWindow = 500;
constexpr int kInfeasStrikes = 4;
constexpr double kInfeasStagnation = 0.98;
constexpr double kInfeasGrowth = 0.25;
constexpr double kRowNormFloor = 1e-10;

void validate_program(const ConicProgram& p) {
  const std::size_t blocks = p.block_dims.size();
  if (blocks == 0) {
    throw InvalidInputError("solve: program has no blocks");
  }
  if (p.objective.size() != blocks) {
    throw InvalidInputError("solve: objective must have one matrix per block");
  }
  for (std::size_t i = 0; i < blocks; ++i) {
    if (p.block_dims[i] < 1) {
      throw InvalidInputError("solve: block dimensions must be positive");
    }
    if (p.objective[i].dim() != p.block_dims[i]) {
      throw InvalidInputError("solve: objective dimension mismatch");
    }
  }
  for (const auto& con : p.constraints) {
    if (con.coeffs.size() != blocks) {
      throw InvalidInputError("solve: constraint must have one matrix per block");
    }
    for (std::size_t i = 0; i < blocks; ++i) {
      if (con.coeffs[i].dim() != p.block_dims[i]) {
        throw InvalidInputError("solve: constraint dimension mismatch");
      }
    }
    if (!std::isfinite(con.rhs)) {
      throw InvalidInputError("solve: constraint rhs must be finite");
    }
  }
}

using VectorSlice = Eigen::Ref<Eigen::VectorXd, 0, Eigen::InnerStride<>>;
using ConstVectorSlice = Eigen::Ref<const Eigen::VectorXd, 0, Eigen::InnerStride<>>;

// Isometric real embedding of a Hermitian block: diagonal first, then
// sqrt(2)-scaled real/imaginary parts of the upper triangle, so Euclidean
// inner products of embeddings equal <A, X>.
void svec_into(const ComplexMatrix& m, VectorSlice out) {
  const Eigen::Index d = m.rows();
  Eigen::Index at = 0;
  for (Eigen::Index p = 0; p < d; ++p) out(at++) = m(p, p).real();
  const double s = std::sqrt(2.0);
  for (Eigen::Index p = 0; p < d; ++p) {
    for (Eigen::Index q = p + 1; q < d; ++q) {
      out(at++) = s * m(p, q).real();
      out(at++) = s * m(p, q).imag();
    }
  }
}

void unsvec_into(const ConstVectorSlice& in, ComplexMatrix& m) {
  const Eigen::Index d = m.rows();
  Eigen::Index at = 0;
  for (Eigen::Index p = 0; p < d; ++p) m(p, p) = in(at++);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index p = 0; p < d; ++p) {
    for (Eigen::Index q = p + 1; q < d; ++q) {
      const Complex value(s * in(at), s * in(at + 1));
      at += 2;
      m(p, q) = value;
      m(q, p) = std::conj(value);
    }
  }
}

double min_eigenvalue(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

struct Standardized {
  Eigen::Index n_mat = 0;
  Eigen::Index n_slack = 0;
  Eigen::MatrixXd a;       // rows scaled by 1/row_scale
  Eigen::VectorXd b;       // scaled rhs
  Eigen::VectorXd c;       // objective embedding divided by c_scale
  double c_scale = 1.0;
  std::vector<double> row_scale;
  std::vector<Eigen::Index> block_offset;
};

Standardized standardize(const ConicProgram& p) {
  Standardized s;
  const std::size_t blocks = p.block_dims.size();
  s.block_offset.resize(blocks);
  for (std::size_t i = 0; i < blocks; ++i) {
    s.block_offset[i] = s.n_mat;
    s.n_mat += p.block_dims[i] * p.block_dims[i];
  }
  const Eigen::Index m = static_cast<Eigen::Index>(p.constraints.size());
  for (const auto& con : p.constraints) {
    if (con.sense != ConstraintSense::Equal) ++s.n_slack;
  }
  const Eigen::Index n_tot = s.n_mat + s.n_slack;

  s.a = Eigen::MatrixXd::Zero(m, n_tot);
  s.b.resize(m);
  s.row_scale.resize(static_cast<std::size_t>(m));
  Eigen::Index slack_at = s.n_mat;
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& con = p.constraints[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < blocks; ++i) {
      const Eigen::Index d = p.block_dims[i];
      svec_into(con.coeffs[i].matrix(), s.a.row(j).segment(s.block_offset[i], d * d));
    }
    // Every row is brought to unit coefficient norm (up or down): the
    // lifted phase programs mix unit-norm diagonal rows with decoding rows
    // whose coefficients are orders of magnitude smaller, and the splitting
    // iteration stalls on the small rows otherwise. Near-zero rows keep
    // scale 1; their slack absorbs whatever the right-hand side asks.
    const double row_norm = s.a.row(j).norm();
    const double scale = row_norm >= kRowNormFloor ? row_norm : 1.0;
    s.row_scale[static_cast<std::size_t>(j)] = scale;
    s.a.row(j) /= scale;
    s.b(j) = con.rhs / scale;
    // Slack enters after normalization so it lives on the same scale as
    // the row it relaxes: <A, X>/scale + s = b/scale for <=, minus for >=.
    if (con.sense == ConstraintSense::LessEqual) {
      s.a(j, slack_at++) = 1.0;
    } else if (con.sense == ConstraintSense::GreaterEqual) {
      s.a(j, slack_at++) = -1.0;
    }
  }

  s.c = Eigen::VectorXd::Zero(n_tot);
  for (std::size_t i = 0; i < blocks; ++i) {
    const Eigen::Index d = p.block_dims[i];
    svec_into(p.objective[i].matrix(), s.c.segment(s.block_offset[i], d * d));
  }
  s.c_scale = std::max(1.0, s.c.norm());
  s.c /= s.c_scale;
  return s;
}

struct Candidate {
  std::vector<HermitianMatrix> x;
  std::vector<double> y;
  double objective = 0.0;
  double min_eig = 0.0;
  KktReport kkt;
};

KktReport compute_kkt(const ConicProgram& p, const std::vector<HermitianMatrix>& x,
                      const std::vector<double>& y) {
  const std::size_t blocks = p.block_dims.size();
  KktReport report;

  double pobj = 0.0;
  for (std::size_t i = 0; i < blocks; ++i) {
    pobj += hermitian_inner(p.objective[i], x[i]);
  }
  double dobj = 0.0;
  double y_scale = 1.0;
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    dobj += y[j] * p.constraints[j].rhs;
    y_scale = std::max(y_scale, std::abs(y[j]));
  }
  const double pair_scale = 1.0 + std::abs(pobj) + std::abs(dobj);

  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const auto& con = p.constraints[j];
    double value = 0.0;
    for (std::size_t i = 0; i < blocks; ++i) {
      value += hermitian_inner(con.coeffs[i], x[i]);
    }
    double violation = 0.0;
    switch (con.sense) {
      case ConstraintSense::LessEqual:
        violation = std::max(0.0, value - con.rhs);
        break;
      case ConstraintSense::Equal:
        violation = std::abs(value - con.rhs);
        break;
      case ConstraintSense::GreaterEqual:
        violation = std::max(0.0, con.rhs - value);
        break;
    }
    report.constraint_violation = std::max(
        report.constraint_violation, violation / (1.0 + std::abs(con.rhs)));
    report.complementary_slackness =
        std::max(report.complementary_slackness,
                 std::abs(y[j] * (value - con.rhs)) / pair_scale);
    // Multiplier sign: >= rows need y >= 0 and <= rows y <= 0 for a
    // minimization; equalities are free.
    double sign_violation = 0.0;
    if (con.sense == ConstraintSense::GreaterEqual) {
      sign_violation = std::max(0.0, -y[j]);
    } else if (con.sense == ConstraintSense::LessEqual) {
      sign_violation = std::max(0.0, y[j]);
    }
    report.dual_cone_violation =
        std::max(report.dual_cone_violation, sign_violation / y_scale);
  }

  double slackness_inner = 0.0;
  for (std::size_t i = 0; i < blocks; ++i) {
    report.psd_violation =
        std::max(report.psd_violation,
                 std::max(0.0, -min_eigenvalue(x[i].matrix())) /
                     (1.0 + x[i].frobenius_norm()));
    ComplexMatrix z = p.objective[i].matrix();
    for (std::size_t j = 0; j < p.constraints.size(); ++j) {
      z.noalias() -= y[j] * p.constraints[j].coeffs[i].matrix();
    }
    report.dual_cone_violation =
        std::max(report.dual_cone_violation,
                 std::max(0.0, -min_eigenvalue(z)) /
                     (1.0 + p.objective[i].frobenius_norm()));
    slackness_inner += z.cwiseProduct(x[i].matrix().conjugate()).sum().real();
  }
  report.complementary_slackness = std::max(
      report.complementary_slackness, std::abs(slackness_inner) / pair_scale);
  report.duality_gap = std::abs(pobj - dobj) / pair_scale;
  return report;
}

}  // namespace

double KktReport::max_residual() const {
  return std::max({constraint_violation, psd_violation, dual_cone_violation,
                   complementary_slackness, duality_gap});
}

KktReport check_kkt(const ConicProgram& p, const ConicSolution& sol) {
  if (sol.x.size() != p.block_dims.size() ||
      sol.duals.size() != p.constraints.size()) {
    throw InvalidInputError("check_kkt: solution does not match program shape");
  }
  return compute_kkt(p, sol.x, sol.duals);
}

ConicSolution solve(const ConicProgram& p, const SolverSettings& settings,
                    SolveState* warm) {
  validate_program(p);
  if (!(settings.tol > 0.0) || settings.max_iterations < 1) {
    throw InvalidInputError("solve: tol must be positive and budget >= 1");
  }
  const std::size_t blocks = p.block_dims.size();
  const Eigen::Index m = static_cast<Eigen::Index>(p.constraints.size());

  auto make_candidate = [&](const Eigen::VectorXd& v_mat,
                            const std::vector<double>& y,
                            const Standardized& s) {
    Candidate cand;
    cand.x.reserve(blocks);
    cand.y = y;
    cand.min_eig = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < blocks; ++i) {
      const Eigen::Index d = p.block_dims[i];
      ComplexMatrix block(d, d);
      unsvec_into(v_mat.segment(s.block_offset[i], d * d), block);
      cand.x.emplace_back(block);
      cand.objective += hermitian_inner(p.objective[i], cand.x.back());
      cand.min_eig = std::min(cand.min_eig, min_eigenvalue(cand.x.back().matrix()));
    }
    cand.kkt = compute_kkt(p, cand.x, cand.y);
    return cand;
  };

  auto finish = [&](Candidate&& cand, SolveStatus status, int iterations) {
    ConicSolution sol;
    sol.x = std::move(cand.x);
    sol.duals = std::move(cand.y);
    sol.objective_value = status == SolveStatus::Infeasible
                              ? std::numeric_limits<double>::quiet_NaN()
                              : cand.objective;
    sol.status = status;
    sol.primal_residual = std::max(cand.kkt.constraint_violation, cand.kkt.psd_violation);
    sol.dual_residual = std::max({cand.kkt.dual_cone_violation,
                                  cand.kkt.complementary_slackness,
                                  cand.kkt.duality_gap});
    sol.min_eigenvalue = cand.min_eig;
    sol.iterations = iterations;
    return sol;
  };

  // Presolve: a row with no matrix coefficients either holds (within the
  // violation the tolerance would accept anyway) or can never hold, which
  // settles infeasibility without iterating.
  for (const auto& con : p.constraints) {
    double coeff_norm = 0.0;
    for (const auto& a : con.coeffs) coeff_norm += a.frobenius_norm();
    if (coeff_norm > 0.0) continue;
    const double margin = 10.0 * settings.tol * (1.0 + std::abs(con.rhs));
    const bool impossible =
        (con.sense == ConstraintSense::LessEqual && con.rhs < -margin) ||
        (con.sense == ConstraintSense::Equal && std::abs(con.rhs) > margin) ||
        (con.sense == ConstraintSense::GreaterEqual && con.rhs > margin);
    if (impossible) {
      Standardized s = standardize(p);
      Candidate cand = make_candidate(Eigen::VectorXd::Zero(s.n_mat),
                                      std::vector<double>(p.constraints.size(), 0.0), s);
      return finish(std::move(cand), SolveStatus::Infeasible, 0);
    }
  }

  Standardized s = standardize(p);
  const Eigen::Index n_tot = s.n_mat + s.n_slack;

  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  if (m > 0) {
    Eigen::MatrixXd gram = s.a * s.a.transpose();
    const double ridge = 1e-12 * (gram.diagonal().mean() + 1.0);
    gram.diagonal().array() += ridge;
    ldlt.compute(gram);
  }

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n_tot);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n_tot);
  double step_rho = 1.0;
  if (warm != nullptr && warm->v.size() == n_tot && warm->lambda.size() == n_tot &&
      warm->step_rho >= kStepRhoMin && warm->step_rho <= kStepRhoMax) {
    v = warm->v;
    lambda = warm->lambda;
    step_rho = warm->step_rho;
  }

  std::vector<ComplexMatrix> workspace;
  workspace.reserve(blocks);
  for (std::size_t i = 0; i < blocks; ++i) {
    workspace.emplace_back(p.block_dims[i], p.block_dims[i]);
  }

  auto extract_duals = [&](const Eigen::VectorXd& mu) {
    std::vector<double> y(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index j = 0; j < m; ++j) {
      y[static_cast<std::size_t>(j)] =
          -step_rho * mu(j) * s.c_scale / s.row_scale[static_cast<std::size_t>(j)];
    }
    return y;
  };

  Eigen::VectorXd u(n_tot), u_rel(n_tot), w(n_tot), v_old(n_tot);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(m);

  double last_pr = std::numeric_limits<double>::infinity();
  double window_pr = std::numeric_limits<double>::infinity();
  double window_dual_norm = 0.0;
  int strikes = 0;

  auto save_warm = [&]() {
    if (warm != nullptr) {
      warm->v = v;
      warm->lambda = lambda;
      warm->step_rho = step_rho;
    }
  };

  for (int it = 1; it <= settings.max_iterations; ++it) {
    w = v - lambda - s.c / step_rho;
    if (m > 0) {
      mu = ldlt.solve(s.a * w - s.b);
      u = w - s.a.transpose() * mu;
    } else {
      u = w;
    }
    u_rel = kOverRelaxation * u + (1.0 - kOverRelaxation) * v;
    v_old = v;
    v = u_rel + lambda;
    for (std::size_t i = 0; i < blocks; ++i) {
      const Eigen::Index d = p.block_dims[i];
      auto segment = v.segment(s.block_offset[i], d * d);
      unsvec_into(segment, workspace[i]);
      detail::psd_clip_in_place(workspace[i]);
      svec_into(workspace[i], segment);
    }
    v.tail(s.n_slack) = v.tail(s.n_slack).cwiseMax(0.0);
    lambda += u_rel - v;

    if (it % kAdaptEvery == 0) {
      const double pr = (u - v).norm();
      const double dr = step_rho * (v - v_old).norm();
      if (pr > kAdaptRatio * dr && step_rho * kAdaptFactor <= kStepRhoMax) {
        step_rho *= kAdaptFactor;
        lambda /= kAdaptFactor;
      } else if (dr > kAdaptRatio * pr && step_rho / kAdaptFactor >= kStepRhoMin) {
        step_rho /= kAdaptFactor;
        lambda *= kAdaptFactor;
      }
    }

    const bool last_iteration = it == settings.max_iterations;
    if (it % kCheckEvery == 0 || last_iteration) {
      Candidate cand = make_candidate(v.head(s.n_mat), extract_duals(mu), s);
      last_pr = cand.kkt.constraint_violation;
      if (cand.kkt.max_residual() <= settings.tol &&
          cand.min_eig >= -settings.tol) {
        save_warm();
        return finish(std::move(cand), SolveStatus::Optimal, it);
      }
      if (last_iteration) {
        save_warm();
        return finish(std::move(cand), SolveStatus::MaxIterations, it);
      }
    }

    if (it % kInfeasWindow == 0) {
      // Unscaled dual magnitude grows linearly (slope step_rho * gap) when
      // the affine set misses the cone; it stays bounded otherwise.
      const double dual_norm = step_rho * lambda.norm();
      const double gap_norm = (u_rel - v).norm();
      const bool stagnant = last_pr > settings.infeasibility_tol &&
                            last_pr > kInfeasStagnation * window_pr;
      // A vanishing splitting gap means the sets still intersect within
      // tolerance; only a persistent gap with linear dual growth counts.
      const bool diverging =
          gap_norm > 10.0 * settings.tol * (1.0 + v.norm()) &&
          (dual_norm - window_dual_norm) >
              kInfeasGrowth * kInfeasWindow * step_rho * gap_norm;
      strikes = (stagnant && diverging) ? strikes + 1 : 0;
      window_pr = last_pr;
      window_dual_norm = dual_norm;
      if (strikes >= kInfeasStrikes) {
        Candidate cand = make_candidate(v.head(s.n_mat), extract_duals(mu), s);
        save_warm();
        return finish(std::move(cand), SolveStatus::Infeasible, it);
      }
    }
  }

  Candidate cand = make_candidate(v.head(s.n_mat), extract_duals(mu), s);
  save_warm();
  return finish(std::move(cand), SolveStatus::MaxIterations, settings.max_iterations);
}

namespace {

void dump_matrix(const ComplexMatrix& m, std::ostream& os) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) os << ' ';
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g %.17g", m(r, c).real(), m(r, c).imag());
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace

void dump_program(const ConicProgram& p, std::ostream& os) {
  os << "conic-program\n";
  os << "blocks " << p.block_dims.size() << '\n';
  os << "dims";
  for (auto d : p.block_dims) os << ' ' << d;
  os << '\n';
  os << "constraints " << p.constraints.size() << '\n';
  for (std::size_t i = 0; i < p.objective.size(); ++i) {
    os << "objective " << i << '\n';
    dump_matrix(p.objective[i].matrix(), os);
  }
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const auto& con = p.constraints[j];
    const char* sense = con.sense == ConstraintSense::LessEqual ? "le"
                        : con.sense == ConstraintSense::Equal   ? "eq"
                                                                : "ge";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", con.rhs);
    os << "constraint " << j << ' ' << sense << ' ' << buf << '\n';
    for (std::size_t i = 0; i < con.coeffs.size(); ++i) {
      os << "block " << i << '\n';
      dump_matrix(con.coeffs[i].matrix(), os);
    }
  }
}

}  // namespace irsnoma
