#pragma once

#include "dexmap/contact_map.hpp"
#include "dexmap/energies.hpp"
#include "dexmap/kinematics.hpp"
#include "dexmap/lp.hpp"

#include <array>
#include <vector>

namespace dexmap {

struct StabilityConfig {
  double friction_mu = 1.0;
  int cone_edges = 8;
  double object_mass = 0.1;    ///< kg
  double acceleration = 0.5;   ///< m/s^2
  double contact_tolerance = 2e-3;
  double refine_threshold = 5e-3;
  double refine_step = 0.01;
  double map_gamma = 1.0;
  double map_distance_scale = 100.0;

  void validate() const;
};

/// Contact points with outward object normals.
struct ContactSet {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::size_t size() const { return points.size(); }
};

struct StabilityReport {
  std::array<bool, 6> per_direction{};  ///< +x, -x, +y, -y, +z, -z
  bool passed = false;
  double max_penetration = 0.0;
  int contact_count = 0;
  double friction_mu = 1.0;
  int lp_failures = 0;
};

struct DiversityStats {
  VecX per_joint_std;
  double mean_std = 0.0;
  int sample_count = 0;
};

/// The six external wrenches: mass * acceleration along +-x, +-y, +-z
/// through the reference point, no torque.
std::array<Vec6, 6> disturbance_wrenches(double mass, double acceleration);

/// Wrench generators of the linearized friction cones: column 8i+k is the
/// k-th pyramid edge of contact i (unit normal component, pushing into the
/// object) with its torque about `center`.
Eigen::MatrixXd cone_wrench_generators(const ContactSet& contacts, double mu, int edges,
                                       const Vec3& center);

/// Can contact forces with unit normal-force caps cancel `external`?
LpStatus resists(const ContactSet& contacts, double mu, int edges, const Vec3& center, const Vec6& external);

StabilityReport wrench_resistance_test(const ContactSet& contacts, const Vec3& center,
                                       const StabilityConfig& cfg);

/// Moves links within cfg.refine_threshold of the object toward touching
/// it by one gradient step on the squared (centimeter) link-to-target
/// distance over the joint angles. Joint-limit violations never grow.
GraspPose refine_contacts(const HandModel& hand, const ObjectModel& obj, const GraspPose& pose,
                          const StabilityConfig& cfg = {});

/// Object samples whose aligned contact value is >= 0.5 and which lie
/// within `tolerance` of the hand's collision geometry.
ContactSet extract_contacts(const HandModel& hand, const ObjectModel& obj, const GraspPose& pose,
                            double tolerance, const StabilityConfig& cfg = {});

/// Refine, extract contacts, run the LP for all six directions.
StabilityReport evaluate_grasp(const HandModel& hand, const ObjectModel& obj, const GraspPose& pose,
                               const StabilityConfig& cfg = {}, GraspPose* refined = nullptr);

/// Population standard deviation per joint over passing grasps. With fewer
/// than two passing grasps all values are 0.
DiversityStats diversity(const std::vector<GraspPose>& poses, const std::vector<StabilityReport>& reports);

}  // namespace dexmap
