#pragma once

// Error metrics and summary statistics.

#include "ipm/geometry.hpp"

#include <map>
#include <vector>

namespace ipm {

/// ||u_hat - u||_M^2 / ||u||_M^2.
double ur_error(const IdealPoint& u_hat, const IdealPoint& u_true, const MetricMatrix& m_true);

/// ||L o |V^T V_hat| - L||_F^2 / ||L||_F^2 with L = diag(true eigenvalues), both
/// decompositions in descending eigenvalue order and matched by column.
double wer_error(const MetricMatrix& m_true, const MetricMatrix& m_hat);

/// Discordant pairs over N(N-1)/2. Arguments are rankings (item ids by rank).
double kendall_tau_norm(const std::vector<Index>& rank_a, const std::vector<Index>& rank_b);

/// |top_K(a) & top_K(b)| / K.
double topk_fraction(const std::vector<Index>& rank_est, const std::vector<Index>& rank_true, Index k);

/// Grouped-data median for samples on a grid of spacing w.
double interpolated_median(std::vector<double> samples, double w);

/// Linear interpolation between order statistics at rank h = (n - 1) q + 1.
std::vector<double> quantiles(std::vector<double> samples, const std::vector<double>& qs);

double median(std::vector<double> samples);

struct TrialMetrics {
  double ur_error = 0.0;
  double wer_error = 0.0;
  double kendall_norm = 0.0;
  std::map<Index, double> topk_fractions;
};

}  // namespace ipm
