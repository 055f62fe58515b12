#pragma once

#include "dexmap/energies.hpp"
#include "dexmap/random.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace dexmap {

struct MalaConfig {
  double step_size = 1e-3;
  double noise_scale = 1.0;
  double temperature = 1.0;      ///< at the first step
  double temperature_end = 1e-3; ///< geometric annealing target
  int steps = 2000;
  int batch = 64;
  std::uint64_t seed = 0;
  double switch_probability = 0.1;  ///< per-step region re-draw
  // Diagonal preconditioner per coordinate group, divided by the running
  // RMS of the gradient when rms_decay > 0.
  double translation_scale = 0.02;
  double rotation_scale = 0.6;
  double joint_scale = 10.0;
  double region_scale = 25.0;
  double rms_decay = 0.0;
  double rms_damping = 1.0;
  /// Per-chain step adaptation toward `target_acceptance` (0 disables).
  double adapt_rate = 0.05;
  double target_acceptance = 0.3;
  // Acceptance thresholds for a valid record.
  double dfc_max = 0.5;
  double pen_max = 1e-4;
  double prior_max = 1e-6;
  /// Optional gate on max |delta| at the contact points (off by default).
  double contact_distance_max = std::numeric_limits<double>::infinity();
  EnergyWeights weights;
  double map_gamma = 1.0;
  double map_distance_scale = 100.0;
  unsigned jobs = 1;

  void validate() const;
  double temperature_at(int step) const;
};

/// Generic MALA state for an energy over R^n.
struct MalaState {
  VecX x;
  double energy = 0.0;
  VecX gradient;
};

using EnergyFn = std::function<double(const VecX& x, VecX* gradient)>;

/// One preconditioned MALA transition at temperature T:
/// x' = x - h M grad E + sqrt(2 h T) noise M^(1/2) xi, accepted with the
/// Metropolis-Hastings ratio. `project` (optional) is applied to x' before
/// evaluation. Non-finite proposals are rejected. Returns true on accept.
bool mala_step(MalaState& s, const EnergyFn& energy, const VecX& precond, double step_size,
               double temperature, double noise_scale, Rng& rng,
               const std::function<void(VecX&)>& project = {});

struct GraspRecord {
  std::string hand;
  std::string object;
  GraspPose pose;
  std::vector<RegionAssignment> regions;
  EnergyBreakdown energy;
  double contact_distance = 0.0;  ///< max |delta| over the contact points
  ContactMap contact_map;
  std::uint64_t seed = 0;
  int chain = 0;
  bool valid = false;
};

struct SynthesisSummary {
  int chains = 0;
  int valid = 0;
  double acceptance_rate = 0.0;
  double seconds = 0.0;
};

struct ChainStats {
  double acceptance = 0.0;
  std::vector<double> energy;      ///< total every `trace_every` steps
  std::vector<double> acceptance_window;
  std::vector<double> step_size;
  int trace_every = 100;
};

/// Runs one annealed chain and returns its final state as a record (valid
/// or not). Deterministic in (cfg.seed, chain).
GraspRecord run_chain(const HandModel& hand, const ObjectModel& obj, const MalaConfig& cfg, int chain,
                      ChainStats* stats = nullptr);

/// Runs cfg.batch chains and keeps the final states passing the
/// thresholds, in chain order.
std::vector<GraspRecord> synthesize_grasps(const HandModel& hand, const ObjectModel& obj,
                                           const MalaConfig& cfg, SynthesisSummary* summary = nullptr);

/// Recomputes the energy and the validity flag of a record.
void score_record(GraspRecord& rec, const HandModel& hand, const ObjectModel& obj, const MalaConfig& cfg);

}  // namespace dexmap
