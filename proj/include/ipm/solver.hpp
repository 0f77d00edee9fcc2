#pragma once

// Convex programs for the metric, the distances and the ideal point.
//
// Single-step program (metric M, distances d, slack zeta):
//
//   min  hinge(d) + gamma1 ||zeta||_1 + gamma2 ||M||_F^2 + gamma3 ||d||_2^2
//   s.t. -zeta <= (I - R R^+)(a_M - Q d) <= zeta,  zeta >= 0,  M >= 0
//
// Alternating program: same objective, constraint a_M - Q d - 2 R M u_prev.
// With zeta eliminated (zeta = |constraint|) both are instances of
// admm::Problem; see admm.hpp for the algorithm and the monitored sequence.

#include "ipm/admm.hpp"
#include "ipm/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ipm {

struct RegularizationParams {
  double gamma1 = 2.0;
  double gamma2 = 0.002;
  double gamma3 = 0.001;
  double alpha = 1.0;

  void validate() const;
};

using SolverStatus = admm::Status;
using StepRule = admm::StepRule;

std::string to_string(SolverStatus status);

struct SolverConfig {
  int max_iters = 20000;
  double kkt_tol = 1e-6;
  double gap_tol = 1e-5;  // relative duality gap required for Converged
  StepRule step_rule = StepRule::ResidualBalancing;
  double penalty_rho = 1.0;
  std::optional<std::uint64_t> seed;
  double relaxation = 1.6;
  bool record_history = false;

  void validate() const;
  admm::Settings to_settings() const;
};

struct SolverSolution {
  MetricMatrix M_hat = MetricMatrix::zero(1);
  DistanceVector d_hat;
  Vector zeta_hat;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  SolverStatus status = SolverStatus::MaxIters;
  /// Best feasible objective at each residual check (only if record_history).
  std::vector<double> objective_history;
};

double hinge_loss(const DistanceVector& d, const ComparisonSet& omega, const Observations& y);

/// Frobenius-nearest PSD matrix. Input must be symmetric within
/// 1e-8 * max(1, ||A||_F).
MetricMatrix psd_project(const Matrix& a);

/// Assembled programs, exposed for tests and diagnostics. Parameter layout is
/// [svec(M), d restricted to `active_items`] for the metric programs and
/// [d restricted to `active_items`] for the Euclidean distance program.
struct AssembledProgram {
  admm::Problem problem;
  std::vector<Index> active_items;
  Index dim = 0;
  Index item_count = 0;
};

AssembledProgram assemble_single_step(const ItemEmbedding& x, const ComparisonSet& omega,
                                      const Observations& y, const RegularizationParams& params,
                                      const ComparisonOperators& ops);
AssembledProgram assemble_alternating_step(const ItemEmbedding& x, const ComparisonSet& omega,
                                           const Observations& y, const IdealPoint& u_prev,
                                           const RegularizationParams& params,
                                           const ComparisonOperators& ops);

SolverSolution solve_single_step(const ItemEmbedding& x, const ComparisonSet& omega,
                                 const Observations& y, const RegularizationParams& params,
                                 const SolverConfig& cfg);

SolverSolution solve_alternating_step(const ItemEmbedding& x, const ComparisonSet& omega,
                                      const Observations& y, const IdealPoint& u_prev,
                                      const RegularizationParams& params, const SolverConfig& cfg);

/// Distance-only program with the metric fixed to the identity:
///   min hinge(d) + gamma1 ||zeta||_1 + gamma2 ||d||^2,
///   |(I - R R^+)(diag(S R^T) - Q d)| <= zeta.
/// M_hat of the result is the identity.
SolverSolution solve_euclidean_distances(const ItemEmbedding& x, const ComparisonSet& omega,
                                         const Observations& y, const RegularizationParams& params,
                                         const SolverConfig& cfg);

struct IdealPointSolution {
  IdealPoint u_hat;
  double objective = 0.0;
  int iterations = 0;
  SolverStatus status = SolverStatus::MaxIters;
};

/// Direct hinge program in u under the Euclidean expansion
///   d_i - d_j = ||x_i||^2 - ||x_j||^2 - 2 (x_i - x_j)^T u,
/// plus lambda ||u||^2.
IdealPointSolution solve_euclidean_ideal_point(const ItemEmbedding& x, const ComparisonSet& omega,
                                               const Observations& y, double lambda_ridge,
                                               const SolverConfig& cfg);

/// u = 1/2 (M R^T R M + alpha I)^{-1} M R^T (a_M - Q d), by Cholesky-type solve.
IdealPoint estimate_u(const MetricMatrix& m_hat, const ComparisonOperators& ops,
                      const DistanceVector& d_hat, const ComparisonSet& omega, double alpha);

/// u = 1/2 M^+ R^+ (a_M - delta), pseudoinverses with the operators' cutoff.
IdealPoint estimate_u_unregularized(const MetricMatrix& m, const ComparisonOperators& ops,
                                    const Vector& delta_gamma_vec);

}  // namespace ipm
