#pragma once

#include "dexmap/kinematics.hpp"
#include "dexmap/object_model.hpp"

#include <json.hpp>

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dexmap {

enum class DistanceMetric { aligned, euclidean };

std::string to_string(DistanceMetric m);
DistanceMetric metric_from_string(const std::string& s);

/// Per-object-sample contact values in (0, 1].
///
/// `distance_scale` multiplies metric distances before the square root, so
/// 1 means meters and 100 centimeters.
struct ContactMap {
  std::string object;
  DistanceMetric metric = DistanceMetric::aligned;
  double gamma = 1.0;
  double distance_scale = 1.0;
  std::vector<double> values;
};

/// min over hand samples of exp(gamma (1 - <unit(v_o - v_h), n_o>)) sqrt(scale |v_o - v_h|).
/// Zero when v_o coincides with a sample. Throws std::invalid_argument on an
/// empty hand surface or negative gamma.
double aligned_distance(const SurfacePoint& v_o, const Eigen::Matrix3Xd& hand_points, double gamma,
                        double distance_scale = 1.0);
double euclidean_distance(const Vec3& v_o, const Eigen::Matrix3Xd& hand_points,
                          double distance_scale = 1.0);

/// 1 - 2 (sigmoid(D) - 0.5). Throws std::domain_error for D < 0.
double contact_value(double distance);
/// d contact_value / dD.
double contact_value_derivative(double distance);

/// Values >= 0.5 become 1; the input is not modified.
ContactMap sharpen_map(const ContactMap& map);

/// Contact map of a posed hand against an object's samples.
///
/// The aligned metric measures alignment against the inward object normal,
/// i.e. against the direction a contact force pushes into the surface.
ContactMap contact_map(const ObjectModel& obj, const HandSurface& hand, DistanceMetric metric,
                       double gamma = 1.0, double distance_scale = 1.0);

/// Pruned evaluator for repeated contact maps of one (object, hand) pair.
/// Returns min(D, cutoff) exactly: the brute-force minima wherever they lie
/// below the cutoff (all of them for the default infinite cutoff).
class ContactMapEvaluator {
 public:
  ContactMapEvaluator(const ObjectModel& obj, const HandModel& hand, DistanceMetric metric,
                      double gamma, double distance_scale,
                      double cutoff = std::numeric_limits<double>::infinity());

  struct Result {
    std::vector<double> distance;  ///< min(D, cutoff) per object sample
    std::vector<int> argmin;       ///< minimizing hand sample, -1 where clamped
  };

  /// `hint` (optional) holds a previous argmin per object sample; it only
  /// speeds up pruning.
  void evaluate(const KinematicFrames& frames, const HandSurface& hand, Result& out,
                const std::vector<int>* hint = nullptr) const;

  /// dD/d(hand sample position) for object sample i at its argmin; zero
  /// where the distance is clamped.
  Vec3 distance_gradient(std::size_t i, const HandSurface& hand, const Result& r) const;

  ContactMap to_map(const Result& r) const;

  DistanceMetric metric() const { return metric_; }
  double gamma() const { return gamma_; }
  double distance_scale() const { return scale_; }
  double cutoff() const { return cutoff_; }
  const ObjectModel& object() const { return obj_; }

 private:
  struct LinkBall {
    Vec3 center;  // link frame
    double radius;
    int first_cluster;
    int end_cluster;
  };

  const ObjectModel& obj_;
  const HandModel& hand_;
  DistanceMetric metric_;
  double gamma_;
  double scale_;
  double cutoff_;
  std::vector<LinkBall> links_;
  std::vector<Vec3> inward_;  // per object sample
};

/// JSON {object, metric, gamma, distance_scale, values}.
nlohmann::json to_json(const ContactMap& map);
/// Throws nlohmann::json::exception on missing or mistyped fields.
ContactMap contact_map_from_json(const nlohmann::json& j);
void write_contact_map_json(const ContactMap& map, const std::filesystem::path& path);
ContactMap read_contact_map_json(const std::filesystem::path& path);
/// Object samples with the map values as a per-vertex "value" property.
void write_contact_map_ply(const ContactMap& map, const ObjectModel& obj,
                           const std::filesystem::path& path);

}  // namespace dexmap
