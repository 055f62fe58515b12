#pragma once

#include "dexmap/geometry.hpp"

#include <span>

namespace dexmap {

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Smallest sphere containing every point (Welzl's move-to-front scheme).
/// An empty input yields a zero sphere at the origin.
Sphere min_enclosing_sphere(std::span<const Vec3> points);

/// Smallest sphere having all of `support` (1 to 4 points) on its boundary.
/// Affinely dependent sets fall back to the largest sub-basis sphere.
Sphere sphere_through(std::span<const Vec3> support);

}  // namespace dexmap
