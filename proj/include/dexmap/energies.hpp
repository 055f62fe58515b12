#pragma once

#include "dexmap/contact_map.hpp"
#include "dexmap/kinematics.hpp"
#include "dexmap/object_model.hpp"

#include <json.hpp>

#include <limits>
#include <optional>
#include <vector>

namespace dexmap {

using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Stacked wrench G c = sum_i [c_i; x_i x c_i]. Throws DimensionError unless
/// both lists have the same length >= 2.
Vec6 dfc_wrench(const std::vector<Vec3>& points, const std::vector<Vec3>& normals);
double dfc(const std::vector<Vec3>& points, const std::vector<Vec3>& normals);

/// Sum over hand samples of max(0, -delta).
double penetration_energy(const HandSurface& hand, const ObjectModel& obj);
double penetration_energy(const Eigen::Matrix3Xd& points, const ObjectModel& obj);

/// | relu(q - upper) + relu(lower - q) | over the joint angles.
double prior_energy(const GraspPose& pose, const HandModel& hand);
VecX prior_gradient(const GraspPose& pose, const HandModel& hand);

/// Mean squared difference. Throws DimensionError on length mismatch.
double contact_match_energy(const ContactMap& current, const ContactMap& goal);

enum class EnergyMode { synthesis, transfer };

struct EnergyWeights {
  double dfc = 1.0;
  double pen = 100.0;
  double prior = 10.0;
  double contact = 100.0;
  /// Synthesis only: pulls contact points onto the object surface.
  double dist = 30.0;
  /// Pseudo-Huber width of the distance term, meters (0 gives |delta|).
  double dist_width = 3e-3;
};

struct EnergyBreakdown {
  double dfc_norm = 0.0;
  double e_pen = 0.0;
  double e_prior = 0.0;
  double e_contact = 0.0;
  double e_dist = 0.0;  ///< sum of huber(delta) at contact points
  double total = 0.0;
  EnergyWeights weights;
};

nlohmann::json to_json(const EnergyBreakdown& e);
nlohmann::json to_json(const EnergyWeights& w);
EnergyWeights weights_from_json(const nlohmann::json& j, EnergyWeights defaults = {});

/// Hand configuration plus the contact-region coordinates used by the
/// synthesis energy (empty for transfer).
struct GraspState {
  GraspPose pose;
  std::vector<RegionAssignment> regions;

  /// [q_global, q_joint, u_0, v_0, u_1, v_1, ...]
  VecX flat() const;
  void set_flat(const VecX& x);
};

/// Weighted energy of one mode for a fixed (hand, object) pair, with
/// analytic gradients through the kinematic chain.
class GraspEnergy {
 public:
  /// Synthesis: w_dfc |Gc| + w_pen E_p + w_prior E_n + w_dist sum h(delta(x_i)),
  /// h(d) = sqrt(d^2 + k^2) - k with k = dist_width.
  GraspEnergy(const HandModel& hand, const ObjectModel& obj, EnergyWeights weights);
  /// Transfer: w_contact E_c + w_pen E_p + w_prior E_n against `goal`,
  /// which is used as given (callers sharpen it). Distances are clamped at
  /// `distance_cutoff` (see ContactMapEvaluator).
  GraspEnergy(const HandModel& hand, const ObjectModel& obj, const ContactMap& goal,
              EnergyWeights weights, DistanceMetric metric, double gamma, double distance_scale,
              double distance_cutoff = std::numeric_limits<double>::infinity());

  /// Reusable per-chain scratch; keeps contact-map argmins between calls.
  struct Workspace {
    std::vector<int> hint;
    ContactMapEvaluator::Result cmap;
  };

  EnergyBreakdown evaluate(const GraspState& state, VecX* gradient = nullptr,
                           Workspace* ws = nullptr) const;

  EnergyMode mode() const { return mode_; }
  const EnergyWeights& weights() const { return weights_; }
  const HandModel& hand() const { return hand_; }
  const ObjectModel& object() const { return obj_; }
  const ContactMapEvaluator* contact_evaluator() const { return evaluator_ ? &*evaluator_ : nullptr; }

 private:
  const HandModel& hand_;
  const ObjectModel& obj_;
  EnergyMode mode_;
  EnergyWeights weights_;
  std::vector<double> goal_;
  std::optional<ContactMapEvaluator> evaluator_;
};

}  // namespace dexmap
