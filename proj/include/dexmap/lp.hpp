#pragma once

#include "dexmap/geometry.hpp"

namespace dexmap {

enum class LpStatus { feasible, infeasible, failed };

struct LpResult {
  LpStatus status = LpStatus::failed;
  VecX x;              ///< a feasible point when status == feasible
  double residual = 0.0;  ///< phase-1 objective at termination
  int pivots = 0;
};

/// Feasibility of {x >= 0 : A x = b} by the phase-1 simplex method on a
/// dense tableau with Bland's rule.
LpResult solve_feasibility(const Eigen::MatrixXd& A, const VecX& b, double tolerance = 1e-9,
                           int max_pivots = 100000);

}  // namespace dexmap
