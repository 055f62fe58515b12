#include "dexmap/mesh_distance.hpp"

#include "dexmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace dexmap {

TriangleClosest closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                          const Vec3& c) {
  // Voronoi-region walk (Ericson, Real-Time Collision Detection, 5.1.5).
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {a, TriangleFeature::vertex0};

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return {b, TriangleFeature::vertex1};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    return {a + (d1 / (d1 - d3)) * ab, TriangleFeature::edge01};
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return {c, TriangleFeature::vertex2};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    return {a + (d2 / (d2 - d6)) * ac, TriangleFeature::edge20};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b + w * (c - b), TriangleFeature::edge12};
  }

  const double denom = 1.0 / (va + vb + vc);
  return {a + ab * (vb * denom) + ac * (vc * denom), TriangleFeature::face};
}

MeshDistanceField::MeshDistanceField(const TriangleMesh& mesh) : mesh_(mesh) {
  const std::size_t nf = mesh_.faces.size();
  if (nf == 0) throw ValidationError("distance field needs a non-empty mesh");
  closed_ = is_closed_manifold(mesh_);

  face_normals_.resize(nf);
  vertex_normals_.assign(mesh_.vertices.size(), Vec3::Zero());
  edge_normals_.resize(nf);
  std::map<std::pair<int, int>, Vec3> edge_sum;
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& tri = mesh_.faces[f];
    face_normals_[f] = mesh_.face_normal(f);
    for (int k = 0; k < 3; ++k) {
      const Vec3 p = mesh_.vertices[tri[k]];
      const Vec3 e1 = (mesh_.vertices[tri[(k + 1) % 3]] - p).normalized();
      const Vec3 e2 = (mesh_.vertices[tri[(k + 2) % 3]] - p).normalized();
      const double angle = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
      vertex_normals_[tri[k]] += angle * face_normals_[f];
      const int u = tri[k], v = tri[(k + 1) % 3];
      auto [it, inserted] = edge_sum.try_emplace({std::min(u, v), std::max(u, v)}, Vec3::Zero());
      it->second += face_normals_[f];
    }
  }
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& tri = mesh_.faces[f];
    for (int k = 0; k < 3; ++k) {
      const int u = tri[k], v = tri[(k + 1) % 3];
      edge_normals_[f][k] = edge_sum.at({std::min(u, v), std::max(u, v)});
    }
  }

  tri_boxes_.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    Eigen::AlignedBox3d box;
    for (int k = 0; k < 3; ++k) box.extend(mesh_.corner(f, k));
    tri_boxes_[f] = box;
  }
  order_.resize(nf);
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * nf);
  build(0, static_cast<int>(nf));
  build_lattice();
}

int MeshDistanceField::build(int begin, int end) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box, centroids;
  for (int i = begin; i < end; ++i) {
    box.extend(tri_boxes_[order_[i]]);
    centroids.extend(tri_boxes_[order_[i]].center());
  }
  nodes_[idx].box = box;
  if (end - begin <= 4) {
    nodes_[idx].begin = begin;
    nodes_[idx].end = end;
    return idx;
  }
  int axis = 0;
  centroids.sizes().maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double ca = tri_boxes_[a].center()[axis];
                     const double cb = tri_boxes_[b].center()[axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[idx].left = left;
  nodes_[idx].right = right;
  return idx;
}

void MeshDistanceField::nearest(const Vec3& x, double& best_d2, int& best_tri,
                                TriangleClosest& best) const {
  best_d2 = std::numeric_limits<double>::infinity();
  best_tri = -1;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    // Ties must still be visited so the smallest triangle index wins.
    if (node.box.squaredExteriorDistance(x) > best_d2) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int f = order_[i];
        const auto& tri = mesh_.faces[f];
        const TriangleClosest c = closest_point_on_triangle(
            x, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]], mesh_.vertices[tri[2]]);
        const double d2 = (x - c.point).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && f < best_tri)) {
          best_d2 = d2;
          best_tri = f;
          best = c;
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squaredExteriorDistance(x);
    const double dr = nodes_[node.right].box.squaredExteriorDistance(x);
    // Push the farther child first so the nearer one is expanded next.
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
}

Vec3 MeshDistanceField::pseudonormal(int triangle, TriangleFeature feature) const {
  const auto& tri = mesh_.faces[triangle];
  switch (feature) {
    case TriangleFeature::face: return face_normals_[triangle];
    case TriangleFeature::edge01: return edge_normals_[triangle][0];
    case TriangleFeature::edge12: return edge_normals_[triangle][1];
    case TriangleFeature::edge20: return edge_normals_[triangle][2];
    case TriangleFeature::vertex0: return vertex_normals_[tri[0]];
    case TriangleFeature::vertex1: return vertex_normals_[tri[1]];
    case TriangleFeature::vertex2: return vertex_normals_[tri[2]];
  }
  return face_normals_[triangle];
}

Vec3 MeshDistanceField::edge_direction(int triangle, TriangleFeature feature) const {
  const auto& tri = mesh_.faces[triangle];
  int i = 0, j = 1;
  if (feature == TriangleFeature::edge12) { i = 1; j = 2; }
  if (feature == TriangleFeature::edge20) { i = 2; j = 0; }
  return (mesh_.vertices[tri[j]] - mesh_.vertices[tri[i]]).normalized();
}

DistanceQuery MeshDistanceField::query(const Vec3& x) const {
  if (!closed_) {
    throw ValidationError("signed distance requested on an open mesh");
  }
  double d2 = 0.0;
  int tri = -1;
  TriangleClosest c{};
  nearest(x, d2, tri, c);

  DistanceQuery q;
  q.closest = c.point;
  q.triangle = tri;
  q.feature = c.feature;
  const Vec3 diff = x - c.point;
  const double r = std::sqrt(d2);
  const Vec3 psi = pseudonormal(tri, c.feature);
  const bool outside = diff.dot(psi) >= 0.0;
  q.distance = outside ? r : -r;
  if (r > 0.0) {
    q.gradient = outside ? Vec3(diff / r) : Vec3(-diff / r);
  } else {
    q.gradient = psi.normalized();
  }
  return q;
}

double MeshDistanceField::unsigned_distance(const Vec3& x) const {
  double d2 = 0.0;
  int tri = -1;
  TriangleClosest c{};
  nearest(x, d2, tri, c);
  return std::sqrt(d2);
}

Mat3 MeshDistanceField::gradient_jacobian(const Vec3& x, const DistanceQuery& q) const {
  const double r = std::abs(q.distance);
  if (q.feature == TriangleFeature::face || r <= 0.0) return Mat3::Zero();
  // gradient = s * (x - p) / r with s the sign; p moves along the feature.
  const Vec3 u = (x - q.closest) / r;
  Mat3 P = Mat3::Identity() - u * u.transpose();
  if (q.feature == TriangleFeature::edge01 || q.feature == TriangleFeature::edge12 ||
      q.feature == TriangleFeature::edge20) {
    const Vec3 e = edge_direction(q.triangle, q.feature);
    P -= e * e.transpose();
  }
  const double s = q.distance >= 0.0 ? 1.0 : -1.0;
  return (s / r) * P;
}

void MeshDistanceField::build_lattice() {
  if (!closed_) return;
  Eigen::AlignedBox3d box;
  for (const auto& v : mesh_.vertices) box.extend(v);
  const double extent = box.sizes().maxCoeff();
  const double margin = 0.05 * extent + 1e-6;
  box.min().array() -= margin;
  box.max().array() += margin;
  lattice_step_ = extent / 24.0 + 1e-9;
  lattice_box_ = box;
  lattice_dims_ = ((box.sizes() / lattice_step_).array().ceil().cast<int>() + 1).max(2);
  lattice_.resize(static_cast<std::size_t>(lattice_dims_.prod()));
  std::size_t n = 0;
  for (int k = 0; k < lattice_dims_.z(); ++k) {
    for (int j = 0; j < lattice_dims_.y(); ++j) {
      for (int i = 0; i < lattice_dims_.x(); ++i) {
        const Vec3 p = box.min() + lattice_step_ * Vec3(i, j, k);
        lattice_[n++] = query(p).distance;
      }
    }
  }
}

double MeshDistanceField::distance_lower_bound(const Vec3& x) const {
  if (lattice_.empty()) return -std::numeric_limits<double>::infinity();
  if (!lattice_box_.contains(x)) {
    return std::sqrt(lattice_box_.squaredExteriorDistance(x));
  }
  const Eigen::Array3d rel = (x - lattice_box_.min()).array() / lattice_step_;
  const Eigen::Array3i idx = rel.round().cast<int>().max(0).min(lattice_dims_ - 1);
  const Vec3 node = lattice_box_.min() + lattice_step_ * idx.cast<double>().matrix();
  const std::size_t n = static_cast<std::size_t>(
      idx.x() + lattice_dims_.x() * (idx.y() + lattice_dims_.y() * idx.z()));
  return lattice_[n] - (x - node).norm();
}

}  // namespace dexmap
