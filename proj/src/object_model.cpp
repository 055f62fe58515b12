#include "dexmap/object_model.hpp"

#include "dexmap/errors.hpp"

#include <algorithm>
#include <iostream>
#include <random>

namespace dexmap {

namespace {

std::vector<SurfacePoint> sample_surface(const TriangleMesh& mesh, std::size_t count,
                                         std::uint64_t seed) {
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += mesh.face_area(f);
    cumulative[f] = total;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<SurfacePoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double pick = uni(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t f = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), mesh.faces.size() - 1);
    const double s = std::sqrt(uni(rng));
    const double t = uni(rng);
    const Vec3 a = mesh.corner(f, 0), b = mesh.corner(f, 1), c = mesh.corner(f, 2);
    out.push_back({(1.0 - s) * a + s * (1.0 - t) * b + s * t * c, mesh.face_normal(f)});
  }
  return out;
}

}  // namespace

ObjectModel::ObjectModel(std::string name, TriangleMesh mesh, std::size_t sample_count,
                         std::uint64_t sample_seed)
    : name_(std::move(name)) {
  if (mesh.faces.empty()) throw ValidationError(name_ + ": empty mesh");
  if (sample_count == 0) throw ValidationError(name_ + ": sample_count must be positive");
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!(mesh.face_area(f) > 1e-12)) {
      throw ValidationError(name_ + ": degenerate triangle " + std::to_string(f));
    }
  }
  field_ = std::make_shared<const MeshDistanceField>(mesh);
  if (!field_->closed()) {
    std::cerr << "warning: " << name_ << " is not a closed manifold; signed distance unavailable\n";
  }
  samples_ = sample_surface(field_->mesh(), sample_count, sample_seed);
  centroid_ = volume_centroid(field_->mesh());
  sphere_ = dexmap::min_enclosing_sphere(std::span<const Vec3>(field_->mesh().vertices));
}

ObjectModel load_object(const std::filesystem::path& path, std::size_t sample_count,
                        std::uint64_t sample_seed) {
  return ObjectModel(path.stem().string(), load_mesh(path), sample_count, sample_seed);
}

Sphere min_enclosing_sphere(const ObjectModel& obj) { return obj.enclosing_sphere(); }

void export_samples_ply(const ObjectModel& obj, const std::filesystem::path& path) {
  std::vector<Vec3> p, n;
  for (const auto& s : obj.surface_points()) {
    p.push_back(s.position);
    n.push_back(s.normal);
  }
  write_point_ply(path, p, n);
}

}  // namespace dexmap
