#include "dexmap/enclosing_sphere.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace dexmap {

namespace {

Sphere two_point(const Vec3& a, const Vec3& b) {
  return {0.5 * (a + b), 0.5 * (a - b).norm()};
}

// Circumsphere of a triangle with its center in the triangle's plane.
bool three_point(const Vec3& a, const Vec3& b, const Vec3& c, Sphere& out) {
  const Vec3 u = b - a, v = c - a;
  const Vec3 w = u.cross(v);
  const double w2 = w.squaredNorm();
  if (w2 <= 1e-30 * u.squaredNorm() * v.squaredNorm()) return false;
  const Vec3 offset = (u.squaredNorm() * v.cross(w) + v.squaredNorm() * w.cross(u)) / (2.0 * w2);
  out = {a + offset, offset.norm()};
  return true;
}

bool four_point(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, Sphere& out) {
  Mat3 A;
  A.row(0) = (b - a).transpose();
  A.row(1) = (c - a).transpose();
  A.row(2) = (d - a).transpose();
  const double scale = A.rowwise().norm().prod();
  const double det = A.determinant();
  if (std::abs(det) <= 1e-12 * scale) return false;
  const Vec3 rhs(0.5 * A.row(0).squaredNorm(), 0.5 * A.row(1).squaredNorm(),
                 0.5 * A.row(2).squaredNorm());
  const Vec3 offset = A.partialPivLu().solve(rhs);
  out = {a + offset, offset.norm()};
  return true;
}

bool contains(const Sphere& s, const Vec3& p) {
  const double tol = 1e-12 * std::max(1.0, s.radius);
  return (p - s.center).norm() <= s.radius + tol;
}

Sphere largest_sub_basis(std::span<const Vec3> support) {
  Sphere best;
  const std::size_t n = support.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Sphere s = two_point(support[i], support[j]);
      if (s.radius > best.radius) best = s;
      for (std::size_t k = j + 1; k < n; ++k) {
        Sphere t;
        if (three_point(support[i], support[j], support[k], t) && t.radius > best.radius) best = t;
      }
    }
  }
  if (n == 1) best = {support[0], 0.0};
  return best;
}

Sphere welzl(std::vector<Vec3>& pts, std::size_t end, std::array<Vec3, 4>& boundary,
             std::size_t nb) {
  Sphere s = nb == 0 ? Sphere{pts.empty() ? Vec3::Zero() : pts[0], -1.0}
                     : sphere_through(std::span<const Vec3>(boundary.data(), nb));
  if (nb == 4) return s;
  for (std::size_t i = 0; i < end; ++i) {
    if (s.radius >= 0.0 && contains(s, pts[i])) continue;
    boundary[nb] = pts[i];
    s = welzl(pts, i, boundary, nb + 1);
    // Move-to-front keeps boundary-defining points early for later scans.
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(i),
                pts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
  return s;
}

}  // namespace

Sphere sphere_through(std::span<const Vec3> support) {
  switch (support.size()) {
    case 0: return {};
    case 1: return {support[0], 0.0};
    case 2: return two_point(support[0], support[1]);
    case 3: {
      Sphere s;
      if (three_point(support[0], support[1], support[2], s)) return s;
      return largest_sub_basis(support);
    }
    default: {
      Sphere s;
      if (four_point(support[0], support[1], support[2], support[3], s)) return s;
      return largest_sub_basis(support.first(4));
    }
  }
}

Sphere min_enclosing_sphere(std::span<const Vec3> points) {
  if (points.empty()) return {};
  std::vector<Vec3> pts(points.begin(), points.end());
  std::mt19937_64 rng(0x5eed);
  std::shuffle(pts.begin(), pts.end(), rng);
  std::array<Vec3, 4> boundary;
  Sphere s = welzl(pts, pts.size(), boundary, 0);
  return {s.center, std::max(0.0, s.radius)};
}

}  // namespace dexmap
