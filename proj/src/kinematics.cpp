#include "dexmap/kinematics.hpp"

#include "dexmap/errors.hpp"

#include <string>

namespace dexmap {

VecX GraspPose::flat() const {
  VecX q(6 + joints.size());
  q << translation, rotation, joints;
  return q;
}

GraspPose GraspPose::from_flat(const VecX& q) {
  if (q.size() < 6) throw DimensionError("pose vector shorter than 6");
  GraspPose p;
  p.translation = q.head<3>();
  p.rotation = q.segment<3>(3);
  p.joints = q.tail(q.size() - 6);
  return p;
}

bool GraspPose::finite() const {
  return translation.allFinite() && rotation.allFinite() && joints.allFinite();
}

KinematicFrames forward_kinematics(const HandModel& hand, const GraspPose& pose) {
  if (static_cast<std::size_t>(pose.joints.size()) != hand.dof()) {
    throw DimensionError("pose has " + std::to_string(pose.joints.size()) + " joint angles, hand '" +
                         hand.name() + "' has " + std::to_string(hand.dof()));
  }
  if (!pose.finite()) throw std::invalid_argument("pose has non-finite entries");
  KinematicFrames f;
  f.links.assign(hand.links().size(), Transform::Identity());
  f.joint_axes.assign(hand.dof(), Vec3::Zero());
  f.joint_origins.assign(hand.dof(), Vec3::Zero());
  f.links[hand.root_link()] = make_transform(rotation_from_axis_angle(pose.rotation), pose.translation);
  for (const int j : hand.joint_order()) {
    const JointSpec& js = hand.joints()[j];
    const Transform anchor = f.links[hand.joint_parent_index(j)] * js.origin;
    const Transform rot(Eigen::AngleAxisd(pose.joints(j), js.axis));
    f.links[hand.joint_child_index(j)] = anchor * rot;
    f.joint_axes[j] = anchor.linear() * js.axis;
    f.joint_origins[j] = anchor.translation();
  }
  return f;
}

HandSurface hand_surface(const HandModel& hand, const KinematicFrames& frames) {
  HandSurface s;
  const auto n = static_cast<Eigen::Index>(hand.sample_count());
  s.points.resize(3, n);
  s.normals.resize(3, n);
  s.link = &hand.sample_link();
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < hand.links().size(); ++l) {
    const Transform& T = frames.links[l];
    for (const auto& p : hand.links()[l].surface_samples) {
      s.points.col(k) = T * p.position;
      s.normals.col(k) = T.linear() * p.normal;
      ++k;
    }
  }
  return s;
}

HandSurface hand_surface(const HandModel& hand, const GraspPose& pose) {
  return hand_surface(hand, forward_kinematics(hand, pose));
}

std::vector<Vec3> sample_contact_points(const HandModel& hand, const KinematicFrames& frames,
                                        const std::vector<RegionAssignment>& regions) {
  std::vector<Vec3> out;
  out.reserve(regions.size());
  for (const auto& a : regions) {
    if (a.region < 0 || static_cast<std::size_t>(a.region) >= hand.contact_regions().size()) {
      throw DimensionError("contact region index " + std::to_string(a.region) + " out of range");
    }
    const ContactRegionSpec& r = hand.contact_regions()[a.region];
    const Vec3 local = r.origin + a.u * r.edge1 + a.v * r.edge2;
    out.push_back(frames.links[hand.region_link_index(a.region)] * local);
  }
  return out;
}

std::vector<Vec3> sample_contact_points(const HandModel& hand, const GraspPose& pose,
                                        const std::vector<RegionAssignment>& regions) {
  return sample_contact_points(hand, forward_kinematics(hand, pose), regions);
}

Vec3 region_normal(const HandModel& hand, const KinematicFrames& frames, int region) {
  const ContactRegionSpec& r = hand.contact_regions()[region];
  return frames.links[hand.region_link_index(region)].linear() * r.edge1.cross(r.edge2).normalized();
}

PoseGradient::PoseGradient(const HandModel& hand, const KinematicFrames& frames)
    : hand_(hand),
      frames_(frames),
      force_(hand.links().size(), Vec3::Zero()),
      moment_(hand.links().size(), Vec3::Zero()) {}

void PoseGradient::add(int link, const Vec3& world_point, const Vec3& grad) {
  force_[link] += grad;
  moment_[link] += world_point.cross(grad);
}

VecX PoseGradient::finish(const GraspPose& pose) const {
  std::vector<Vec3> F = force_, M = moment_;
  VecX g = VecX::Zero(6 + static_cast<Eigen::Index>(hand_.dof()));
  const auto& order = hand_.joint_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int j = *it;
    const int c = hand_.joint_child_index(j), p = hand_.joint_parent_index(j);
    // Rotating the child subtree by dq about (axis, origin) moves point x by
    // a x (x - o) dq.
    g(6 + j) = frames_.joint_axes[j].dot(M[c] - frames_.joint_origins[j].cross(F[c]));
    F[p] += F[c];
    M[p] += M[c];
  }
  const int root = hand_.root_link();
  g.head<3>() = F[root];
  const Vec3 torque = M[root] - pose.translation.cross(F[root]);
  g.segment<3>(3) = so3_left_jacobian(pose.rotation).transpose() * torque;
  return g;
}

}  // namespace dexmap
