#pragma once

#include "dexmap/energies.hpp"
#include "dexmap/random.hpp"

#include <cstdint>
#include <vector>

namespace dexmap {

struct TransferConfig {
  int restarts = 32;
  int steps = 600;
  double adam_lr = 5e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int checkpoint_every = 50;
  std::uint64_t seed = 0;
  EnergyWeights weights;
  DistanceMetric metric = DistanceMetric::aligned;
  double gamma = 1.0;
  double distance_scale = 100.0;
  /// Contact distances are clamped here; contact values below
  /// 2 / (1 + e^cutoff) stop contributing gradient.
  double distance_cutoff = 12.0;
  unsigned jobs = 1;

  void validate() const;
};

struct TransferCheckpoint {
  int step = 0;
  double best_total = 0.0;  ///< best-so-far over all restarts
};

struct TransferResult {
  GraspPose best_pose;
  EnergyBreakdown best_energy;
  int best_restart = -1;
  std::vector<double> all_final_energies;  ///< NaN marks a failed restart
  std::vector<GraspPose> initial_poses;
  std::vector<double> initial_energies;
  std::vector<TransferCheckpoint> trajectory;
  double seconds = 0.0;
};

/// Random root rotation; the palm origin sits on the object's enclosing
/// sphere, displaced from its center along the rotated palm-backward axis.
/// Joints start at mid-range.
GraspPose init_pose(const HandModel& hand, const ObjectModel& obj, Rng& rng);

/// Adam descent of the transfer energy from one start pose.
struct AdamRun {
  GraspPose pose;
  EnergyBreakdown energy;
  std::vector<double> checkpoints;  ///< total at steps 0, k, 2k, ...
  bool failed = false;
};
AdamRun adam_descent(const GraspEnergy& energy, GraspPose start, const TransferConfig& cfg);

/// Sharpens `goal` and keeps the best of cfg.restarts Adam descents.
/// Throws std::runtime_error when every restart fails.
TransferResult optimize_to_map(const HandModel& hand, const ObjectModel& obj, const ContactMap& goal,
                               const TransferConfig& cfg);

}  // namespace dexmap
