#include "ipm/solver.hpp"

#include "ipm/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ipm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw PreconditionError(what);
}

void check_inputs(const ItemEmbedding& x, const ComparisonSet& omega, const Observations& y) {
  require(omega.size() >= 1, "solver: at least one comparison is required");
  require(y.size() == omega.size(), "solver: observation count does not match comparisons");
  require(omega.item_count() <= x.count(), "solver: comparison indices exceed item count");
}

std::vector<Index> active_items(const ComparisonSet& omega) {
  std::vector<Index> items;
  items.reserve(static_cast<std::size_t>(2 * omega.size()));
  for (const auto& p : omega.pairs()) {
    items.push_back(p.i);
    items.push_back(p.j);
  }
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

// Q restricted to active items: row k has +1 at i_k and -1 at j_k.
Matrix difference_rows(const ComparisonSet& omega, const std::vector<Index>& active) {
  std::vector<Index> column(static_cast<std::size_t>(omega.item_count()), -1);
  for (std::size_t c = 0; c < active.size(); ++c) column[static_cast<std::size_t>(active[c])] = static_cast<Index>(c);
  Matrix q = Matrix::Zero(omega.size(), static_cast<Index>(active.size()));
  for (Index k = 0; k < omega.size(); ++k) {
    q(k, column[static_cast<std::size_t>(omega[k].i)]) = 1.0;
    q(k, column[static_cast<std::size_t>(omega[k].j)]) = -1.0;
  }
  return q;
}

AssembledProgram assemble_metric_program(const ItemEmbedding& x, const ComparisonSet& omega,
                                         const Observations& y, const RegularizationParams& params,
                                         const Matrix& metric_block) {
  AssembledProgram out;
  out.dim = x.dim();
  out.item_count = x.count();
  out.active_items = active_items(omega);
  const Index m = svec_size(out.dim);
  const Index na = static_cast<Index>(out.active_items.size());
  const Index p = omega.size();
  const Matrix q = difference_rows(omega, out.active_items);

  auto& pr = out.problem;
  pr.psd_dim = out.dim;
  pr.hinge_rows = Matrix::Zero(p, m + na);
  pr.hinge_rows.rightCols(na) = y.values().asDiagonal() * q;
  pr.hinge_offset = Vector::Zero(p);

  Matrix constraint(p, m + na);
  constraint.leftCols(m) = metric_block;
  constraint.rightCols(na) = -q;
  pr.abs_rows = std::move(constraint);
  pr.abs_offset = Vector::Zero(p);
  pr.abs_weight = params.gamma1;

  pr.quad_weights.resize(m + na);
  pr.quad_weights.head(m).setConstant(params.gamma2);
  pr.quad_weights.tail(na).setConstant(params.gamma3);
  return out;
}

SolverSolution finish_metric(const AssembledProgram& prog, const admm::Result& res) {
  const Index m = svec_size(prog.dim);
  SolverSolution sol;
  sol.M_hat = MetricMatrix(smat(res.theta.head(m), prog.dim));
  sol.d_hat.values = Vector::Zero(prog.item_count);
  for (std::size_t c = 0; c < prog.active_items.size(); ++c)
    sol.d_hat.values(prog.active_items[c]) = res.theta(m + static_cast<Index>(c));
  sol.zeta_hat = (prog.problem.abs_rows * res.theta + prog.problem.abs_offset).cwiseAbs();
  sol.objective = res.objective;
  sol.primal_residual = res.primal_residual;
  sol.dual_residual = res.dual_residual;
  sol.relative_gap = res.relative_gap;
  sol.iterations = res.iterations;
  sol.status = res.status;
  sol.objective_history = res.best_objective_history;
  return sol;
}

}  // namespace

void RegularizationParams::validate() const {
  require(gamma1 > 0.0, "RegularizationParams: gamma1 must be positive");
  require(gamma2 >= 0.0 && gamma3 >= 0.0 && alpha >= 0.0,
          "RegularizationParams: gamma2, gamma3, alpha must be nonnegative");
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIters: return "max_iters";
    case SolverStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  require(max_iters >= 1, "SolverConfig: max_iters must be >= 1");
  require(kkt_tol > 0.0, "SolverConfig: kkt_tol must be positive");
  require(gap_tol > 0.0, "SolverConfig: gap_tol must be positive");
  require(penalty_rho > 0.0, "SolverConfig: penalty_rho must be positive");
  require(relaxation > 0.0 && relaxation < 2.0, "SolverConfig: relaxation must lie in (0, 2)");
}

admm::Settings SolverConfig::to_settings() const {
  admm::Settings s;
  s.max_iters = max_iters;
  s.tol = kkt_tol;
  s.gap_tol = gap_tol;
  s.rho = penalty_rho;
  s.step_rule = step_rule;
  s.relaxation = relaxation;
  s.seed = seed;
  s.record_history = record_history;
  return s;
}

double hinge_loss(const DistanceVector& d, const ComparisonSet& omega, const Observations& y) {
  require(y.size() == omega.size(), "hinge_loss: length mismatch");
  return kernels::hinge_sum(y.values(), delta_gamma(d, omega));
}

MetricMatrix psd_project(const Matrix& a) {
  require(a.rows() == a.cols(), "psd_project: matrix must be square");
  require(max_asymmetry(a) <= 1e-8 * std::max(1.0, a.norm()), "psd_project: matrix is not symmetric");
  return MetricMatrix(admm::project_psd(a));
}

AssembledProgram assemble_single_step(const ItemEmbedding& x, const ComparisonSet& omega,
                                      const Observations& y, const RegularizationParams& params,
                                      const ComparisonOperators& ops) {
  AssembledProgram prog = assemble_metric_program(x, omega, y, params,
                                                  kernels::metric_design_rows(x.items(), omega.pairs()));
  prog.problem.abs_rows = ops.project_residual_block(prog.problem.abs_rows);
  return prog;
}

AssembledProgram assemble_alternating_step(const ItemEmbedding& x, const ComparisonSet& omega,
                                           const Observations& y, const IdealPoint& u_prev,
                                           const RegularizationParams& params,
                                           const ComparisonOperators& ops) {
  require(u_prev.dim() == x.dim(), "solve_alternating_step: u_prev dimension mismatch");
  const Matrix block = kernels::metric_design_rows(x.items(), omega.pairs()) -
                       2.0 * kernels::bilinear_design_rows(ops.R(), u_prev.coords);
  return assemble_metric_program(x, omega, y, params, block);
}

SolverSolution solve_single_step(const ItemEmbedding& x, const ComparisonSet& omega,
                                 const Observations& y, const RegularizationParams& params,
                                 const SolverConfig& cfg) {
  check_inputs(x, omega, y);
  params.validate();
  cfg.validate();
  const ComparisonOperators ops = build_operators(x, omega);
  const AssembledProgram prog = assemble_single_step(x, omega, y, params, ops);
  return finish_metric(prog, admm::solve(prog.problem, cfg.to_settings()));
}

SolverSolution solve_alternating_step(const ItemEmbedding& x, const ComparisonSet& omega,
                                      const Observations& y, const IdealPoint& u_prev,
                                      const RegularizationParams& params, const SolverConfig& cfg) {
  check_inputs(x, omega, y);
  params.validate();
  cfg.validate();
  const ComparisonOperators ops = build_operators(x, omega);
  const AssembledProgram prog = assemble_alternating_step(x, omega, y, u_prev, params, ops);
  return finish_metric(prog, admm::solve(prog.problem, cfg.to_settings()));
}

SolverSolution solve_euclidean_distances(const ItemEmbedding& x, const ComparisonSet& omega,
                                         const Observations& y, const RegularizationParams& params,
                                         const SolverConfig& cfg) {
  check_inputs(x, omega, y);
  params.validate();
  cfg.validate();
  const ComparisonOperators ops = build_operators(x, omega);
  const std::vector<Index> active = active_items(omega);
  const Matrix q = difference_rows(omega, active);
  const Index p = omega.size();
  const Index dim = x.dim();

  admm::Problem pr;
  pr.hinge_rows = y.values().asDiagonal() * q;
  pr.hinge_offset = Vector::Zero(p);
  pr.abs_rows = ops.project_residual_block(-q);
  pr.abs_offset = ops.project_residual(a_of_M(ops, Matrix::Identity(dim, dim)));
  pr.abs_weight = params.gamma1;
  pr.quad_weights = Vector::Constant(static_cast<Index>(active.size()), params.gamma2);

  const admm::Result res = admm::solve(pr, cfg.to_settings());
  SolverSolution sol;
  sol.M_hat = MetricMatrix::identity(dim);
  sol.d_hat.values = Vector::Zero(x.count());
  for (std::size_t c = 0; c < active.size(); ++c) sol.d_hat.values(active[c]) = res.theta(static_cast<Index>(c));
  sol.zeta_hat = (pr.abs_rows * res.theta + pr.abs_offset).cwiseAbs();
  sol.objective = res.objective;
  sol.primal_residual = res.primal_residual;
  sol.dual_residual = res.dual_residual;
  sol.relative_gap = res.relative_gap;
  sol.iterations = res.iterations;
  sol.status = res.status;
  sol.objective_history = res.best_objective_history;
  return sol;
}

IdealPointSolution solve_euclidean_ideal_point(const ItemEmbedding& x, const ComparisonSet& omega,
                                               const Observations& y, double lambda_ridge,
                                               const SolverConfig& cfg) {
  check_inputs(x, omega, y);
  cfg.validate();
  require(lambda_ridge >= 0.0, "solve_euclidean_ideal_point: lambda must be nonnegative");
  const ComparisonOperators ops = build_operators(x, omega);
  const Index dim = x.dim();

  admm::Problem pr;
  pr.hinge_rows = y.values().asDiagonal() * (-2.0 * ops.R());
  pr.hinge_offset = y.values().cwiseProduct(a_of_M(ops, Matrix::Identity(dim, dim)));
  pr.abs_rows = Matrix(0, dim);
  pr.abs_offset = Vector(0);
  pr.quad_weights = Vector::Constant(dim, lambda_ridge);

  const admm::Result res = admm::solve(pr, cfg.to_settings());
  return {IdealPoint(res.theta), res.objective, res.iterations, res.status};
}

IdealPoint estimate_u(const MetricMatrix& m_hat, const ComparisonOperators& ops,
                      const DistanceVector& d_hat, const ComparisonSet& omega, double alpha) {
  require(alpha >= 0.0, "estimate_u: alpha must be nonnegative");
  require(m_hat.dim() == ops.dim(), "estimate_u: dimension mismatch");
  const Matrix& m = m_hat.matrix();
  const Matrix rm = ops.R() * m;
  Matrix lhs = rm.transpose() * rm;
  lhs.diagonal().array() += alpha;
  const Vector rhs = rm.transpose() * (a_of_M(ops, m) - delta_gamma(d_hat, omega));
  Eigen::LDLT<Matrix> ldlt(lhs);
  const Vector piv = ldlt.vectorD().cwiseAbs();
  const double scale = std::max(piv.maxCoeff(), 1e-300);
  if (ldlt.info() != Eigen::Success || piv.minCoeff() <= 1e-13 * scale) {
    if (m.isZero(0.0)) return IdealPoint(Vector::Zero(m_hat.dim()));
    throw PreconditionError("estimate_u: singular system (alpha = 0 with rank-deficient M R^T R M)");
  }
  return IdealPoint(0.5 * ldlt.solve(rhs));
}

IdealPoint estimate_u_unregularized(const MetricMatrix& m, const ComparisonOperators& ops,
                                    const Vector& delta_gamma_vec) {
  require(m.dim() == ops.dim(), "estimate_u_unregularized: dimension mismatch");
  require(delta_gamma_vec.size() == ops.size(), "estimate_u_unregularized: length mismatch");
  const Matrix m_pinv = pseudo_inverse(m.matrix(), ops.pinv_tol());
  const Matrix r_pinv = pseudo_inverse(ops.R(), ops.pinv_tol());
  return IdealPoint(0.5 * m_pinv * (r_pinv * (a_of_M(ops, m) - delta_gamma_vec)));
}

}  // namespace ipm
