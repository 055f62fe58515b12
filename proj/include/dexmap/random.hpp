#pragma once

#include "dexmap/geometry.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace dexmap {

using Rng = std::mt19937_64;

/// Stable FNV-1a hash, used to name RNG substreams.
constexpr std::uint64_t stream_id(std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

/// Independent generator for substream (stream, index) of a run seed.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Uniformly distributed rotation, as an axis-angle vector.
inline Vec3 random_rotation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return axis_angle_from_rotation(q.toRotationMatrix());
}

}  // namespace dexmap
