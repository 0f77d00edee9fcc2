#pragma once

// Operator-splitting solver shared by every estimator in this library.
//
// Problem family, over a parameter vector theta:
//
//   minimize   sum_k max(0, 1 - (H theta + h)_k)          hinge block
//            + w * || G theta + g ||_1                     absolute-value block
//            + sum_i q_i theta_i^2                          diagonal ridge
//   subject to smat(theta[0 : svec_size(psd_dim)]) >= 0    optional PSD block
//
// Splitting (scaled-form ADMM, over-relaxed): copies z1 = H theta + h,
// z2 = G theta + g and z3 = leading block of theta. The theta-update is a
// linear solve with a cached Cholesky factor; the z-updates are the closed-form
// proximal maps of the hinge, of the weighted l1 norm (soft threshold) and of
// the PSD indicator (eigenvalue clipping).
//
// Rows and columns are Ruiz-equilibrated before the iteration starts (a single
// column scale for the PSD block, so the cone is unchanged).
//
// Returned iterates are always feasible: the PSD block is taken from the
// projected copy z3. The monitored sequence is the best objective among these
// feasible candidates, evaluated every `check_every` iterations; it is
// non-increasing by construction.
//
// Termination needs both small residuals and a small duality gap. The dual
// bound comes from the scaled multipliers clipped into the conjugate domains,
// so objective - bound is a certificate of distance to the optimum.

#include "ipm/linalg.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace ipm::admm {

struct Problem {
  Matrix hinge_rows;
  Vector hinge_offset;
  Matrix abs_rows;
  Vector abs_offset;
  double abs_weight = 0.0;
  Vector quad_weights;
  Index psd_dim = 0;

  Index num_params() const { return quad_weights.size(); }
  Index psd_params() const { return svec_size(psd_dim); }
};

enum class StepRule { Fixed, ResidualBalancing };

enum class Status { Converged, MaxIters, Infeasible };

struct Settings {
  int max_iters = 20000;
  double tol = 1e-6;      // max-norm primal and dual residuals
  double gap_tol = 1e-5;  // (objective - dual bound) / |objective|
  double rho = 1.0;
  StepRule step_rule = StepRule::ResidualBalancing;
  double relaxation = 1.6;
  int check_every = 10;
  int adapt_every = 1000;
  int scaling_passes = 15;
  std::optional<std::uint64_t> seed;  // random initial point when set
  bool record_history = false;
};

struct Result {
  Vector theta;
  double objective = 0.0;
  double primal_residual = 0.0;  // max-norm, original coordinates, last check
  double dual_residual = 0.0;    // max-norm, original coordinates, last check
  /// Best Lagrange dual bound seen; objective - dual_objective >= 0 bounds the
  /// distance to the optimum.
  double dual_objective = -std::numeric_limits<double>::infinity();
  double relative_gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  Status status = Status::MaxIters;
  std::vector<double> best_objective_history;
};

/// Objective of the (unscaled) problem at theta. Does not check the PSD block.
double objective(const Problem& problem, const Vector& theta);

Result solve(const Problem& problem, const Settings& settings);

/// Projection of a symmetric matrix onto the PSD cone (eigenvalue clipping).
Matrix project_psd(const Matrix& sym);

}  // namespace ipm::admm
