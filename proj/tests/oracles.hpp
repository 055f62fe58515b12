#pragma once
// Reference implementations used only as test oracles. They share no code
// with the library paths they check.

#include "dexmap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

using dexmap::Vec3;

inline Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return a + t * ab;
}

// Plane projection if it falls inside, otherwise the best of the three edges.
inline Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const Vec3 q = p - n * (p - a).dot(n) / n.squaredNorm();
  const double wa = (b - q).cross(c - q).dot(n);
  const double wb = (c - q).cross(a - q).dot(n);
  const double wc = (a - q).cross(b - q).dot(n);
  if (wa >= 0.0 && wb >= 0.0 && wc >= 0.0) return q;
  Vec3 best = closest_on_segment(p, a, b);
  for (const Vec3& cand : {closest_on_segment(p, b, c), closest_on_segment(p, c, a)}) {
    if ((cand - p).squaredNorm() < (best - p).squaredNorm()) best = cand;
  }
  return best;
}

// Generalized winding number via triangle solid angles (Van Oosterom-Strackee).
inline double winding_number(const dexmap::TriangleMesh& mesh, const Vec3& p) {
  double total = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3 a = mesh.vertices[f[0]] - p, b = mesh.vertices[f[1]] - p,
               c = mesh.vertices[f[2]] - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * M_PI);
}

inline double signed_distance(const dexmap::TriangleMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : mesh.faces) {
    const Vec3 q = closest_on_triangle(p, mesh.vertices[f[0]], mesh.vertices[f[1]],
                                       mesh.vertices[f[2]]);
    best = std::min(best, (q - p).norm());
  }
  return winding_number(mesh, p) > 0.5 ? -best : best;
}

// Exhaustive minimum enclosing sphere: every sphere determined by 2, 3 or 4
// points that contains the whole set; the smallest wins.
struct Ball {
  Vec3 center;
  double radius;
};

inline bool encloses(const Ball& b, std::span<const Vec3> pts) {
  for (const Vec3& p : pts) {
    if ((p - b.center).norm() > b.radius + 1e-10) return false;
  }
  return true;
}

inline double brute_force_enclosing_radius(std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  if (n == 1) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vec3& c) {
    double r = 0.0;
    for (const Vec3& p : pts) r = std::max(r, (p - c).norm());
    if (r < best && encloses({c, r}, pts)) best = r;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      consider(0.5 * (pts[i] + pts[j]));
      for (std::size_t k = j + 1; k < n; ++k) {
        // Circumcenter in the plane of (i, j, k) from the 2x2 normal equations.
        const Vec3 u = pts[j] - pts[i], v = pts[k] - pts[i];
        Eigen::Matrix2d A;
        A << u.dot(u), u.dot(v), u.dot(v), v.dot(v);
        if (std::abs(A.determinant()) < 1e-14 * A.norm() * A.norm()) continue;
        const Eigen::Vector2d ab = A.inverse() * Eigen::Vector2d(0.5 * u.dot(u), 0.5 * v.dot(v));
        const Vec3 cc = pts[i] + ab(0) * u + ab(1) * v;
        consider(cc);
        for (std::size_t l = k + 1; l < n; ++l) {
          const Vec3 w = pts[l] - pts[i];
          dexmap::Mat3 M;
          M.row(0) = u;
          M.row(1) = v;
          M.row(2) = w;
          if (std::abs(M.determinant()) < 1e-14) continue;
          const Vec3 rhs(0.5 * u.dot(u), 0.5 * v.dot(v), 0.5 * w.dot(w));
          consider(pts[i] + M.fullPivLu().solve(rhs));
        }
      }
    }
  }
  return best;
}

// Lawson-Hanson active-set solution of min |A x - b| subject to x >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter = 2000) {
  const Eigen::Index n = A.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 1e-12 * (1.0 + A.cwiseAbs().maxCoeff());
  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[j]) idx.push_back(j);
    }
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
    const Eigen::VectorXd zp = Ap.completeOrthogonalDecomposition().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
    return z;
  };
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    Eigen::Index enter = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w(j) > best) {
        best = w(j);
        enter = j;
      }
    }
    if (enter < 0) break;
    passive[enter] = true;
    for (int inner = 0; inner < 2 * n + 10; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      double alpha = 1.0;
      bool clipped = false;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z(j) <= 0.0) {
          alpha = std::min(alpha, x(j) / (x(j) - z(j)));
          clipped = true;
        }
      }
      if (!clipped) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && x(j) <= tol) {
          passive[j] = false;
          x(j) = 0.0;
        }
      }
    }
  }
  return x;
}

// Residual of the best capped friction-cone combination for a target
// wrench: min |W l - t|^2 + sum_i (sum_k l_ik + s_i - 1)^2 over l, s >= 0,
// where `cones[i]` holds contact i's edge wrenches as columns. Zero iff t
// is reachable with unit normal-force caps.
inline double capped_cone_residual(const std::vector<Eigen::Matrix<double, 6, Eigen::Dynamic>>& cones,
                                   const Eigen::Matrix<double, 6, 1>& t) {
  Eigen::Index cols = 0;
  for (const auto& W : cones) cols += W.cols() + 1;
  const Eigen::Index m = static_cast<Eigen::Index>(cones.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6 + m, cols);
  Eigen::VectorXd b(6 + m);
  b << t, Eigen::VectorXd::Ones(m);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& W = cones[static_cast<std::size_t>(i)];
    A.block(0, c, 6, W.cols()) = W;
    A.block(6 + i, c, 1, W.cols() + 1).setOnes();
    c += W.cols() + 1;
  }
  return (A * nnls(A, b) - b).norm();
}

// Coarse force-space grid search for capped friction-pyramid equilibrium.
// Every contact but the last takes a force from a grid over its pyramid
// (quadratic normal levels x tangential rings x directions, unit normal
// cap); the
// last contact absorbs the force balance exactly. Returns the smallest
// (pyramid violation of that last force + torque residual / lever). Zero
// means an exact grid solution; small values mean feasible up to the grid.
inline double grid_equilibrium_residual(const std::vector<Vec3>& points, const std::vector<Vec3>& outward,
                                        double mu, int edges, const Vec3& center,
                                        const Eigen::Matrix<double, 6, 1>& external, int levels = 20,
                                        int rings = 4, int dirs = 16) {
  const std::size_t n = points.size();
  const Vec3 f_ext = external.head<3>(), t_ext = external.tail<3>();
  if (n == 0) return f_ext.norm() + t_ext.norm();
  double lever = 0.0;
  for (const Vec3& p : points) lever = std::max(lever, (p - center).norm());
  lever = std::max(lever, 1e-6);
  const double inscribed = std::cos(std::numbers::pi / edges);

  struct Frame {
    Vec3 n, t1, t2, arm;
  };
  std::vector<Frame> fr;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 in = -outward[i].normalized();
    const Vec3 a = in.unitOrthogonal();
    fr.push_back({in, a, in.cross(a), points[i] - center});
  }
  // Grid forces per contact, inside the pyramid's inscribed circular cone.
  std::vector<Vec3> local;
  for (int l = 0; l <= levels; ++l) {
    const double a = std::pow(static_cast<double>(l) / levels, 2);  // denser near zero
    local.emplace_back(a, 0.0, 0.0);
    for (int r = 1; r <= rings; ++r) {
      const double rad = mu * a * inscribed * r / rings;
      if (rad == 0.0) continue;
      for (int d = 0; d < dirs; ++d) {
        const double th = 2.0 * std::numbers::pi * d / dirs;
        local.emplace_back(a, rad * std::cos(th), rad * std::sin(th));
      }
    }
  }
  auto violation = [&](const Frame& f, const Vec3& force) {
    const double a = force.dot(f.n);
    const double u = force.dot(f.t1), v = force.dot(f.t2);
    double out = std::max(0.0, -a) + std::max(0.0, a - 1.0);
    double gauge = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < edges; ++k) {
      const double th = (2.0 * k + 1.0) * std::numbers::pi / edges;
      gauge = std::max(gauge, u * std::cos(th) + v * std::sin(th));
    }
    return out + std::max(0.0, gauge - mu * std::max(a, 0.0) * inscribed);
  };
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, const Vec3&, const Vec3&)> rec = [&](std::size_t i, const Vec3& F, const Vec3& T) {
    if (i + 1 == n) {
      const Vec3 last = -f_ext - F;
      const Vec3 torque = T + fr[i].arm.cross(last) + t_ext;
      best = std::min(best, violation(fr[i], last) + torque.norm() / lever);
      return;
    }
    for (const Vec3& g : local) {
      const Vec3 f = g.x() * fr[i].n + g.y() * fr[i].t1 + g.z() * fr[i].t2;
      rec(i + 1, F + f, T + fr[i].arm.cross(f));
    }
  };
  rec(0, Vec3::Zero(), Vec3::Zero());
  return best;
}

}  // namespace oracle
