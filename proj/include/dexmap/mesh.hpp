#pragma once

#include "dexmap/geometry.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace dexmap {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  Vec3 corner(std::size_t face, int k) const { return vertices[faces[face][k]]; }
  double face_area(std::size_t face) const;
  Vec3 face_normal(std::size_t face) const;
};

/// Reads an OBJ (v/f records, polygons fan-triangulated) or a PLY file
/// (binary little/big endian or ascii). Throws ParseError.
TriangleMesh load_mesh(const std::filesystem::path& path);

/// True when every edge is shared by exactly two faces with opposite
/// orientation.
bool is_closed_manifold(const TriangleMesh& mesh);

/// Signed volume (positive for outward-wound closed meshes).
double signed_volume(const TriangleMesh& mesh);

/// Center of mass of the enclosed solid, assuming uniform density.
Vec3 volume_centroid(const TriangleMesh& mesh);

/// Binary little-endian PLY point cloud with normals and an optional
/// per-vertex scalar named "value".
void write_point_ply(const std::filesystem::path& path, std::span<const Vec3> points,
                     std::span<const Vec3> normals,
                     std::optional<std::span<const double>> values = std::nullopt);

}  // namespace dexmap
