#pragma once

#include "dexmap/enclosing_sphere.hpp"
#include "dexmap/geometry.hpp"
#include "dexmap/mesh.hpp"
#include "dexmap/mesh_distance.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace dexmap {

/// Oriented object surface sample. The normal points out of the object.
struct SurfacePoint {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
};

/// A rigid object: triangle mesh, its signed distance field and a fixed
/// area-uniform set of surface samples. Immutable after construction.
class ObjectModel {
 public:
  ObjectModel(std::string name, TriangleMesh mesh, std::size_t sample_count,
              std::uint64_t sample_seed = 0);

  const std::string& name() const { return name_; }
  const TriangleMesh& mesh() const { return field_->mesh(); }
  const std::vector<SurfacePoint>& surface_points() const { return samples_; }
  const MeshDistanceField& distance_field() const { return *field_; }
  bool closed() const { return field_->closed(); }
  const Vec3& centroid() const { return centroid_; }
  const Sphere& enclosing_sphere() const { return sphere_; }

  /// Signed distance: positive outside, negative inside.
  double signed_distance(const Vec3& x) const { return field_->query(x).distance; }
  DistanceQuery query(const Vec3& x) const { return field_->query(x); }

 private:
  std::string name_;
  std::shared_ptr<const MeshDistanceField> field_;
  std::vector<SurfacePoint> samples_;
  Vec3 centroid_ = Vec3::Zero();
  Sphere sphere_;
};

inline constexpr std::size_t kDefaultObjectSamples = 2048;

/// Loads an OBJ/PLY mesh; the object name is the file stem. Throws
/// ParseError or ValidationError (degenerate triangles).
ObjectModel load_object(const std::filesystem::path& path,
                        std::size_t sample_count = kDefaultObjectSamples,
                        std::uint64_t sample_seed = 0);

/// Smallest sphere around all mesh vertices.
Sphere min_enclosing_sphere(const ObjectModel& obj);

void export_samples_ply(const ObjectModel& obj, const std::filesystem::path& path);

}  // namespace dexmap
