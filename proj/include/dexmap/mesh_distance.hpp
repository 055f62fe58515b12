#pragma once

#include "dexmap/geometry.hpp"
#include "dexmap/mesh.hpp"

#include <cstdint>
#include <vector>

namespace dexmap {

/// Which part of a triangle holds the closest point.
enum class TriangleFeature : std::uint8_t { face, edge01, edge12, edge20, vertex0, vertex1, vertex2 };

struct TriangleClosest {
  Vec3 point;
  TriangleFeature feature;
};

TriangleClosest closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                          const Vec3& c);

struct DistanceQuery {
  double distance = 0.0;  ///< signed: positive outside, negative inside
  Vec3 closest = Vec3::Zero();
  Vec3 gradient = Vec3::Zero();  ///< unit outward direction, d(distance)/dx
  int triangle = -1;
  TriangleFeature feature = TriangleFeature::face;
};

/// Exact signed distance to a closed triangle mesh.
///
/// Nearest triangles come from an AABB tree; the sign is the angle-weighted
/// pseudonormal test at the closest feature. When several triangles are
/// equally close, the smallest triangle index wins, so gradients at the
/// medial axis are deterministic.
class MeshDistanceField {
 public:
  explicit MeshDistanceField(const TriangleMesh& mesh);

  DistanceQuery query(const Vec3& x) const;

  /// Unsigned distance only; usable on open meshes.
  double unsigned_distance(const Vec3& x) const;

  /// Jacobian of `q.gradient` with respect to the query point.
  Mat3 gradient_jacobian(const Vec3& x, const DistanceQuery& q) const;

  /// Cheap conservative lower bound on the signed distance, from a coarse
  /// lattice of exact values and the 1-Lipschitz property.
  double distance_lower_bound(const Vec3& x) const;

  bool closed() const { return closed_; }
  const TriangleMesh& mesh() const { return mesh_; }

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1;   // child index, or -1 for leaves
    int right = -1;
    int begin = 0;   // leaf triangle range in order_
    int end = 0;
  };

  int build(int begin, int end);
  void nearest(const Vec3& x, double& best_d2, int& best_tri, TriangleClosest& best) const;
  Vec3 pseudonormal(int triangle, TriangleFeature feature) const;
  Vec3 edge_direction(int triangle, TriangleFeature feature) const;
  void build_lattice();

  TriangleMesh mesh_;
  bool closed_ = false;
  std::vector<Vec3> face_normals_;
  std::vector<Vec3> vertex_normals_;
  std::vector<std::array<Vec3, 3>> edge_normals_;  // per triangle, edges 01, 12, 20
  std::vector<int> order_;
  std::vector<Eigen::AlignedBox3d> tri_boxes_;
  std::vector<Node> nodes_;

  Eigen::AlignedBox3d lattice_box_;
  double lattice_step_ = 0.0;
  Eigen::Array3i lattice_dims_ = Eigen::Array3i::Zero();
  std::vector<double> lattice_;
};

}  // namespace dexmap
