#pragma once

#include "dexmap/geometry.hpp"
#include "dexmap/hand_model.hpp"

#include <vector>

namespace dexmap {

/// Hand configuration: root translation (m), root axis-angle (rad) and one
/// angle per revolute joint.
struct GraspPose {
  Vec3 translation = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();
  VecX joints;

  /// Flat (q_global, q_joint) vector of size 6 + N.
  VecX flat() const;
  static GraspPose from_flat(const VecX& q);
  bool finite() const;
};

/// World transform of every link plus the world joint axes and anchors
/// needed for chain-rule gradients.
struct KinematicFrames {
  std::vector<Transform> links;
  std::vector<Vec3> joint_axes;     ///< world axis of each joint
  std::vector<Vec3> joint_origins;  ///< world point on each joint axis
};

/// Throws DimensionError on a size mismatch and std::invalid_argument on
/// non-finite entries.
KinematicFrames forward_kinematics(const HandModel& hand, const GraspPose& pose);

/// World-frame oriented samples of the whole hand; `link[i]` names the
/// owning link of sample i.
struct HandSurface {
  Eigen::Matrix3Xd points;
  Eigen::Matrix3Xd normals;
  const std::vector<int>* link = nullptr;

  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
};

HandSurface hand_surface(const HandModel& hand, const KinematicFrames& frames);
HandSurface hand_surface(const HandModel& hand, const GraspPose& pose);

/// A selected contact region with its rectangle coordinates.
struct RegionAssignment {
  int region = 0;
  double u = 0.5;
  double v = 0.5;
};

/// World contact points X, one per assignment. Throws DimensionError when
/// a region index is out of range.
std::vector<Vec3> sample_contact_points(const HandModel& hand, const KinematicFrames& frames,
                                        const std::vector<RegionAssignment>& regions);
std::vector<Vec3> sample_contact_points(const HandModel& hand, const GraspPose& pose,
                                        const std::vector<RegionAssignment>& regions);

/// Surface normal of a region's rectangle in the world frame, oriented as
/// edge1 x edge2.
Vec3 region_normal(const HandModel& hand, const KinematicFrames& frames, int region);

/// Accumulates dE/dp for points rigidly attached to links and maps the
/// sum to dE/dq over (translation, axis-angle, joints).
class PoseGradient {
 public:
  PoseGradient(const HandModel& hand, const KinematicFrames& frames);

  void add(int link, const Vec3& world_point, const Vec3& grad);
  VecX finish(const GraspPose& pose) const;

 private:
  const HandModel& hand_;
  const KinematicFrames& frames_;
  std::vector<Vec3> force_;   // per link: sum of gradients
  std::vector<Vec3> moment_;  // per link: sum of p x gradient
};

}  // namespace dexmap
