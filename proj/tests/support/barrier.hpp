#pragma once

// High-accuracy reference for the metric programs: a log-barrier Newton method
// on the explicit epigraph form
//
//   min  sum t + gamma1 sum z + gamma2 ||M||^2 + gamma3 ||d||^2
//   s.t. t >= 0, t >= 1 - y (Q d), -z <= c(M, d) <= z, M > 0
//
// Dense and small-problem only. The barrier parameter is pushed until the
// standard bound (#constraints)/tau on the suboptimality is below `gap`.

#include "oracle.hpp"

namespace ipm::testing {

struct BarrierResult {
  double objective = 0.0;
  double gap_bound = 0.0;
  Matrix M;
  Vector d;
  int newton_steps = 0;
};

BarrierResult barrier_reference(const OracleProblem& p, double gap = 1e-10);

}  // namespace ipm::testing
