#pragma once

// Seeded synthetic instances: items uniform on [-2, 2]^D, ideal point uniform on
// [-1, 1]^D, metric M = L^T L with Gaussian L, subject to rejection thresholds.

#include "ipm/geometry.hpp"

#include <cstdint>

namespace ipm {

struct GenConfig {
  Index D = 2;
  Index N = 100;
  double eps_F = 0.5;   // ||M||_F >= eps_F
  double eps_S = 0.25;  // sigma_min(M) >= eps_S
  double eps_P = 0.2;   // ||M u|| / ||u|| >= eps_P
  std::uint64_t seed = 0;
  int max_rejects = 10000;
  bool identity_metric = false;  // M = I (the thresholds still apply to u)

  void validate() const;
};

struct SyntheticInstance {
  ItemEmbedding X;
  IdealPoint u_true;
  MetricMatrix M_true;
  std::uint64_t seed = 0;
  int rejects = 0;  // number of rejected (M, u) draws
};

/// Substream ids under a generation seed.
enum class Stream : std::uint64_t { Items = 1, MetricAndIdeal = 2, Comparisons = 3 };

/// Rejected draws redraw M and u together.
SyntheticInstance gen_instance(const GenConfig& cfg);

/// P unordered pairs drawn uniformly without replacement from the N(N-1)/2
/// pairs, each stored as (i, j) with i < j, in draw order.
ComparisonSet sample_comparisons(Index n, Index p, std::uint64_t seed);

}  // namespace ipm
