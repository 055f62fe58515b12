#include "dexmap/stability.hpp"

#include "dexmap/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dexmap {

void StabilityConfig::validate() const {
  if (!(friction_mu > 0.0)) throw std::invalid_argument("friction_mu must be > 0");
  if (cone_edges < 3) throw std::invalid_argument("cone_edges must be >= 3");
  if (!(object_mass > 0.0) || !(acceleration >= 0.0)) {
    throw std::invalid_argument("object_mass must be > 0 and acceleration >= 0");
  }
  if (!(contact_tolerance >= 0.0)) throw std::invalid_argument("contact_tolerance must be >= 0");
  if (!(refine_threshold >= 0.0) || !(refine_step >= 0.0)) {
    throw std::invalid_argument("refinement threshold and step must be >= 0");
  }
}

std::array<Vec6, 6> disturbance_wrenches(double mass, double acceleration) {
  std::array<Vec6, 6> w;
  for (int d = 0; d < 6; ++d) {
    w[d] = Vec6::Zero();
    w[d](d / 2) = (d % 2 == 0 ? 1.0 : -1.0) * mass * acceleration;
  }
  return w;
}

Eigen::MatrixXd cone_wrench_generators(const ContactSet& contacts, double mu, int edges,
                                       const Vec3& center) {
  if (contacts.points.size() != contacts.normals.size()) {
    throw DimensionError("contact points and normals differ in length");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(contacts.size());
  Eigen::MatrixXd W(6, n * edges);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 inward = -contacts.normals[i].normalized();
    const Vec3 t1 = inward.unitOrthogonal();
    const Vec3 t2 = inward.cross(t1);
    const Vec3 arm = contacts.points[i] - center;
    for (int k = 0; k < edges; ++k) {
      const double a = 2.0 * std::numbers::pi * k / edges;
      const Vec3 f = inward + mu * (std::cos(a) * t1 + std::sin(a) * t2);
      W.col(i * edges + k).head<3>() = f;
      W.col(i * edges + k).tail<3>() = arm.cross(f);
    }
  }
  return W;
}

LpStatus resists(const ContactSet& contacts, double mu, int edges, const Vec3& center, const Vec6& external) {
  const Eigen::Index n = static_cast<Eigen::Index>(contacts.size());
  if (n == 0) return external.isZero(0.0) ? LpStatus::feasible : LpStatus::infeasible;
  const Eigen::MatrixXd W = cone_wrench_generators(contacts, mu, edges, center);
  const Eigen::Index nl = n * edges;
  // Rows: 6 wrench balance, then one normal-force cap per contact with a slack.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6 + n, nl + n);
  VecX b = VecX::Zero(6 + n);
  A.topLeftCorner(6, nl) = W;
  b.head<6>() = -external;
  for (Eigen::Index i = 0; i < n; ++i) {
    A.block(6 + i, i * edges, 1, edges).setOnes();
    A(6 + i, nl + i) = 1.0;
    b(6 + i) = 1.0;
  }
  return solve_feasibility(A, b).status;
}

StabilityReport wrench_resistance_test(const ContactSet& contacts, const Vec3& center,
                                       const StabilityConfig& cfg) {
  cfg.validate();
  StabilityReport r;
  r.friction_mu = cfg.friction_mu;
  r.contact_count = static_cast<int>(contacts.size());
  const auto ext = disturbance_wrenches(cfg.object_mass, cfg.acceleration);
  r.passed = true;
  for (int d = 0; d < 6; ++d) {
    const LpStatus s = resists(contacts, cfg.friction_mu, cfg.cone_edges, center, ext[d]);
    if (s == LpStatus::failed) ++r.lp_failures;
    r.per_direction[d] = s == LpStatus::feasible;
    r.passed = r.passed && r.per_direction[d];
  }
  return r;
}

GraspPose refine_contacts(const HandModel& hand, const ObjectModel& obj, const GraspPose& pose,
                          const StabilityConfig& cfg) {
  const KinematicFrames frames = forward_kinematics(hand, pose);
  const HandSurface surface = hand_surface(hand, frames);
  const MeshDistanceField& field = obj.distance_field();
  const auto& owner = hand.sample_link();

  // Closest sample of every link and its signed distance.
  const std::size_t nl = hand.links().size();
  std::vector<int> closest(nl, -1);
  std::vector<DistanceQuery> best(nl);
  for (Eigen::Index k = 0; k < surface.points.cols(); ++k) {
    const int l = owner[k];
    const Vec3 x = surface.points.col(k);
    if (closest[l] >= 0 && field.distance_lower_bound(x) >= best[l].distance) continue;
    const DistanceQuery q = field.query(x);
    if (closest[l] < 0 || q.distance < best[l].distance) {
      closest[l] = static_cast<int>(k);
      best[l] = q;
    }
  }

  // Targets sit on the surface along -grad delta; loss is sum |p - target|^2 in cm^2.
  constexpr double kCm2 = 1e4;
  PoseGradient acc(hand, frames);
  bool any = false;
  for (std::size_t l = 0; l < nl; ++l) {
    if (closest[l] < 0) continue;
    const double d = best[l].distance;
    if (!(d > 0.0 && d < cfg.refine_threshold)) continue;
    const Vec3 residual = d * best[l].gradient;  // p - target
    acc.add(static_cast<int>(l), surface.points.col(closest[l]), 2.0 * kCm2 * residual);
    any = true;
  }
  if (!any || hand.dof() == 0) return pose;

  const VecX g = acc.finish(pose);
  GraspPose out = pose;
  for (std::size_t j = 0; j < hand.dof(); ++j) {
    const auto& js = hand.joints()[j];
    const double q0 = pose.joints(j);
    const double q1 = q0 - cfg.refine_step * g(6 + static_cast<Eigen::Index>(j));
    out.joints(j) = std::clamp(q1, std::min(js.lower_limit, q0), std::max(js.upper_limit, q0));
  }
  return out;
}

ContactSet extract_contacts(const HandModel& hand, const ObjectModel& obj, const GraspPose& pose,
                            double tolerance, const StabilityConfig& cfg) {
  const KinematicFrames frames = forward_kinematics(hand, pose);
  const HandSurface surface = hand_surface(hand, frames);
  const ContactMap map =
      contact_map(obj, surface, DistanceMetric::aligned, cfg.map_gamma, cfg.map_distance_scale);
  ContactSet out;
  const auto& samples = obj.surface_points();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (map.values[i] < 0.5) continue;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < hand.links().size() && gap > tolerance; ++l) {
      const Vec3 p_link = frames.links[l].inverse() * samples[i].position;
      for (const Primitive& prim : hand.links()[l].primitives) {
        gap = std::min(gap, prim.signed_distance(p_link));
      }
    }
    if (gap <= tolerance) {
      out.points.push_back(samples[i].position);
      out.normals.push_back(samples[i].normal);
    }
  }
  return out;
}

namespace {

double max_penetration(const HandModel& hand, const ObjectModel& obj, const GraspPose& pose) {
  const HandSurface surface = hand_surface(hand, pose);
  const MeshDistanceField& field = obj.distance_field();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < surface.points.cols(); ++k) {
    const Vec3 x = surface.points.col(k);
    if (field.distance_lower_bound(x) >= -worst) continue;
    worst = std::max(worst, -field.query(x).distance);
  }
  return worst;
}

}  // namespace

StabilityReport evaluate_grasp(const HandModel& hand, const ObjectModel& obj, const GraspPose& pose,
                               const StabilityConfig& cfg, GraspPose* refined) {
  cfg.validate();
  const GraspPose p = refine_contacts(hand, obj, pose, cfg);
  const ContactSet contacts = extract_contacts(hand, obj, p, cfg.contact_tolerance, cfg);
  StabilityReport r = wrench_resistance_test(contacts, obj.centroid(), cfg);
  r.max_penetration = max_penetration(hand, obj, p);
  if (refined) *refined = p;
  return r;
}

DiversityStats diversity(const std::vector<GraspPose>& poses, const std::vector<StabilityReport>& reports) {
  if (poses.size() != reports.size()) throw DimensionError("diversity: poses and reports differ in length");
  DiversityStats s;
  std::vector<const VecX*> passing;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (reports[i].passed) passing.push_back(&poses[i].joints);
  }
  s.sample_count = static_cast<int>(passing.size());
  const Eigen::Index n = passing.empty() ? (poses.empty() ? 0 : poses[0].joints.size()) : passing[0]->size();
  s.per_joint_std = VecX::Zero(n);
  if (passing.size() < 2) return s;
  VecX mean = VecX::Zero(n);
  for (const VecX* q : passing) {
    if (q->size() != n) throw DimensionError("diversity: poses have different joint counts");
    mean += *q;
  }
  mean /= static_cast<double>(passing.size());
  VecX var = VecX::Zero(n);
  for (const VecX* q : passing) var += (*q - mean).cwiseAbs2();
  s.per_joint_std = (var / static_cast<double>(passing.size())).cwiseSqrt();
  s.mean_std = n ? s.per_joint_std.mean() : 0.0;
  return s;
}

}  // namespace dexmap
