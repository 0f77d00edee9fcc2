#pragma once

// End-to-end estimation pipelines built on the solver.

#include "ipm/geometry.hpp"
#include "ipm/solver.hpp"

#include <optional>
#include <vector>

namespace ipm {

struct Estimate {
  MetricMatrix M_hat = MetricMatrix::zero(1);
  IdealPoint u_hat;
  DistanceVector d_hat;
  /// Items by ascending distance from u_hat under M_hat; ties by index.
  std::vector<Index> ranking;
  SolverStatus solver_status = SolverStatus::MaxIters;
  int iters = 1;
};

/// Order of items by ascending (x_i - u)^T M (x_i - u), stable on index.
std::vector<Index> rank_items(const ItemEmbedding& x, const IdealPoint& u, const MetricMatrix& m);

// Stop when the ground-truth UR error moves by less than tol between stages.
struct GroundTruthURDelta {
  IdealPoint u_true;
  MetricMatrix M_true = MetricMatrix::zero(1);
  double tol = 1e-3;
};

// Stop when ||u^(k) - u^(k-1)||_2 < tol. Needs no ground truth.
struct EstimateDelta {
  double tol = 1e-3;
};

struct AlternatingParams {
  RegularizationParams init_params{2.0, 0.002, 0.0001, 1.0};
  RegularizationParams iter_params{2.0 / 3.0, 1.0 / 15.0, 7.0 / 1500.0, 0.5};
  int max_outer = 100;
  std::optional<GroundTruthURDelta> ground_truth;  // set: GroundTruthURDelta mode
  EstimateDelta estimate_delta;                    // used when ground_truth is empty

  void validate() const;
};

struct StageRecord {
  int stage = 0;
  double objective = 0.0;
  std::optional<double> ur_error;
  double u_change = 0.0;  // ||u^(k) - u^(k-1)||_2, 0 at stage 0
  SolverStatus status = SolverStatus::MaxIters;
};

struct AlternatingResult {
  Estimate estimate;
  std::vector<StageRecord> trace;
  /// Estimate after stage 0 (equal to fit_single_step with init_params).
  Estimate initial;
  /// Worst solver status seen over all stages.
  SolverStatus worst_status = SolverStatus::Converged;
};

Estimate fit_single_step(const ItemEmbedding& x, const ComparisonSet& omega, const Observations& y,
                         const RegularizationParams& params, const SolverConfig& cfg);

AlternatingResult fit_alternating(const ItemEmbedding& x, const ComparisonSet& omega,
                                  const Observations& y, const AlternatingParams& alt,
                                  const SolverConfig& cfg);

/// Metric fixed to the identity; gamma3 is unused (gamma2 weighs ||d||^2).
Estimate fit_euclidean_alg1(const ItemEmbedding& x, const ComparisonSet& omega, const Observations& y,
                            const RegularizationParams& params, const SolverConfig& cfg);

constexpr double kDefaultEuclideanRidge = 1e-3;

IdealPoint fit_euclidean_alg2(const ItemEmbedding& x, const ComparisonSet& omega, const Observations& y,
                              double lambda_ridge = kDefaultEuclideanRidge,
                              const SolverConfig& cfg = {});

/// Estimate wrapper around fit_euclidean_alg2 (M_hat = I, d_hat from u_hat).
Estimate fit_euclidean_alg2_estimate(const ItemEmbedding& x, const ComparisonSet& omega,
                                     const Observations& y, double lambda_ridge,
                                     const SolverConfig& cfg);

struct Identifiability {
  bool identifiable = false;
  double min_eig = 0.0;
};

Identifiability identifiability_check(const MetricMatrix& m, double tol);

}  // namespace ipm
