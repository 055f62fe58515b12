#include "dexmap/lp.hpp"

#include "dexmap/errors.hpp"

#include <cmath>
#include <vector>

namespace dexmap {

LpResult solve_feasibility(const Eigen::MatrixXd& A, const VecX& b, double tolerance, int max_pivots) {
  if (A.rows() != b.size()) throw DimensionError("lp: A and b differ in row count");
  const Eigen::Index m = A.rows(), n = A.cols();
  LpResult res;
  if (m == 0) {
    res.status = LpStatus::feasible;
    res.x = VecX::Zero(n);
    return res;
  }

  // Columns: n structural, m artificial, then the right-hand side.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = b(i) < 0.0 ? -1.0 : 1.0;
    T.row(i).head(n) = s * A.row(i);
    T(i, n + i) = 1.0;
    T(i, n + m) = s * b(i);
  }
  // Reduced costs of the phase-1 objective sum(artificials).
  for (Eigen::Index i = 0; i < m; ++i) {
    T.row(m).head(n) -= T.row(i).head(n);
    T(m, n + m) -= T(i, n + m);
  }
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

  const double eps = 1e-12;
  for (;;) {
    // Bland: the lowest-index column with a negative reduced cost enters.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (T(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, enter) > eps) {
        const double ratio = T(i, n + m) / T(i, enter);
        if (leave < 0 || ratio < best - eps || (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded direction; cannot happen for phase 1
    if (++res.pivots > max_pivots) {
      res.status = LpStatus::failed;
      return res;
    }
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    basis[leave] = enter;
  }

  res.residual = -T(m, n + m);
  res.x = VecX::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n) res.x(basis[i]) = std::max(0.0, T(i, n + m));
  }
  if (!std::isfinite(res.residual)) {
    res.status = LpStatus::failed;
  } else {
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    res.status = res.residual <= tolerance * scale ? LpStatus::feasible : LpStatus::infeasible;
  }
  return res;
}

}  // namespace dexmap
