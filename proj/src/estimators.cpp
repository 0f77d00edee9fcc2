#include "ipm/estimators.hpp"

#include "ipm/evaluation.hpp"
#include "ipm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ipm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw PreconditionError(what);
}

SolverStatus worse(SolverStatus a, SolverStatus b) {
  auto rank = [](SolverStatus s) {
    switch (s) {
      case SolverStatus::Converged: return 0;
      case SolverStatus::MaxIters: return 1;
      case SolverStatus::Infeasible: return 2;
    }
    return 2;
  };
  return rank(a) >= rank(b) ? a : b;
}

Estimate finish(const ItemEmbedding& x, SolverSolution sol, IdealPoint u, int iters) {
  Estimate e;
  e.ranking = rank_items(x, u, sol.M_hat);
  e.M_hat = std::move(sol.M_hat);
  e.u_hat = std::move(u);
  e.d_hat = std::move(sol.d_hat);
  e.solver_status = sol.status;
  e.iters = iters;
  return e;
}

}  // namespace

std::vector<Index> rank_items(const ItemEmbedding& x, const IdealPoint& u, const MetricMatrix& m) {
  const Vector d = all_distances(x, u, m).values;
  std::vector<Index> order(static_cast<std::size_t>(x.count()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return d(a) < d(b); });
  return order;
}

void AlternatingParams::validate() const {
  init_params.validate();
  iter_params.validate();
  require(max_outer >= 1, "AlternatingParams: max_outer must be >= 1");
  require(estimate_delta.tol > 0.0, "AlternatingParams: tolerance must be positive");
  if (ground_truth) require(ground_truth->tol > 0.0, "AlternatingParams: tolerance must be positive");
}

Estimate fit_single_step(const ItemEmbedding& x, const ComparisonSet& omega, const Observations& y,
                         const RegularizationParams& params, const SolverConfig& cfg) {
  SolverSolution sol = solve_single_step(x, omega, y, params, cfg);
  const ComparisonOperators ops = build_operators(x, omega);
  IdealPoint u = estimate_u(sol.M_hat, ops, sol.d_hat, omega, params.alpha);
  return finish(x, std::move(sol), std::move(u), 1);
}

AlternatingResult fit_alternating(const ItemEmbedding& x, const ComparisonSet& omega,
                                  const Observations& y, const AlternatingParams& alt,
                                  const SolverConfig& cfg) {
  alt.validate();
  if (alt.ground_truth) {
    require(alt.ground_truth->u_true.dim() == x.dim() && alt.ground_truth->M_true.dim() == x.dim(),
            "fit_alternating: ground truth dimension mismatch");
  }
  const ComparisonOperators ops = build_operators(x, omega);
  auto ur_of = [&](const IdealPoint& u) -> std::optional<double> {
    if (!alt.ground_truth) return std::nullopt;
    return ur_error(u, alt.ground_truth->u_true, alt.ground_truth->M_true);
  };

  AlternatingResult out;
  SolverSolution sol = solve_single_step(x, omega, y, alt.init_params, cfg);
  const double obj0 = sol.objective;
  IdealPoint u = estimate_u(sol.M_hat, ops, sol.d_hat, omega, alt.init_params.alpha);
  out.worst_status = sol.status;
  out.trace.push_back({0, obj0, ur_of(u), 0.0, sol.status});
  out.initial = finish(x, std::move(sol), u, 1);
  out.estimate = out.initial;

  for (int k = 1; k < alt.max_outer; ++k) {
    SolverSolution next = solve_alternating_step(x, omega, y, u, alt.iter_params, cfg);
    IdealPoint u_next = estimate_u(next.M_hat, ops, next.d_hat, omega, alt.iter_params.alpha);
    const double change = (u_next.coords - u.coords).norm();
    const std::optional<double> ur = ur_of(u_next);
    out.worst_status = worse(out.worst_status, next.status);
    out.trace.push_back({k, next.objective, ur, change, next.status});
    out.estimate = finish(x, std::move(next), u_next, k + 1);
    out.estimate.solver_status = out.worst_status;
    u = std::move(u_next);

    bool stop = false;
    if (alt.ground_truth) {
      stop = std::abs(*ur - *out.trace[out.trace.size() - 2].ur_error) < alt.ground_truth->tol;
    } else {
      stop = change < alt.estimate_delta.tol;
    }
    if (stop) break;
  }
  return out;
}

Estimate fit_euclidean_alg1(const ItemEmbedding& x, const ComparisonSet& omega, const Observations& y,
                            const RegularizationParams& params, const SolverConfig& cfg) {
  SolverSolution sol = solve_euclidean_distances(x, omega, y, params, cfg);
  const ComparisonOperators ops = build_operators(x, omega);
  IdealPoint u = estimate_u(sol.M_hat, ops, sol.d_hat, omega, params.alpha);
  return finish(x, std::move(sol), std::move(u), 1);
}

IdealPoint fit_euclidean_alg2(const ItemEmbedding& x, const ComparisonSet& omega, const Observations& y,
                              double lambda_ridge, const SolverConfig& cfg) {
  return solve_euclidean_ideal_point(x, omega, y, lambda_ridge, cfg).u_hat;
}

Estimate fit_euclidean_alg2_estimate(const ItemEmbedding& x, const ComparisonSet& omega,
                                     const Observations& y, double lambda_ridge,
                                     const SolverConfig& cfg) {
  const IdealPointSolution s = solve_euclidean_ideal_point(x, omega, y, lambda_ridge, cfg);
  Estimate e;
  e.M_hat = MetricMatrix::identity(x.dim());
  e.u_hat = s.u_hat;
  e.d_hat = all_distances(x, e.u_hat, e.M_hat);
  e.ranking = rank_items(x, e.u_hat, e.M_hat);
  e.solver_status = s.status;
  e.iters = 1;
  return e;
}

Identifiability identifiability_check(const MetricMatrix& m, double tol) {
  require(tol >= 0.0, "identifiability_check: tol must be nonnegative");
  const Vector& lam = m.eigenvalues();
  const double min_eig = lam(lam.size() - 1);
  const double max_eig = lam(0);
  return {max_eig > 0.0 && min_eig > tol * max_eig, min_eig};
}

}  // namespace ipm
