#include "dexmap/energies.hpp"

#include "dexmap/errors.hpp"

#include <cmath>
#include <string>

namespace dexmap {

Vec6 dfc_wrench(const std::vector<Vec3>& points, const std::vector<Vec3>& normals) {
  if (points.size() != normals.size()) throw DimensionError("dfc: points and normals differ in length");
  if (points.size() < 2) throw DimensionError("dfc: needs at least two contacts");
  Vec6 w = Vec6::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) {
    w.head<3>() += normals[i];
    w.tail<3>() += skew(points[i]) * normals[i];
  }
  return w;
}

double dfc(const std::vector<Vec3>& points, const std::vector<Vec3>& normals) {
  return dfc_wrench(points, normals).norm();
}

double penetration_energy(const Eigen::Matrix3Xd& points, const ObjectModel& obj) {
  const MeshDistanceField& field = obj.distance_field();
  double e = 0.0;
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    const Vec3 x = points.col(k);
    if (field.distance_lower_bound(x) > 0.0) continue;
    const double d = field.query(x).distance;
    if (d < 0.0) e -= d;
  }
  return e;
}

double penetration_energy(const HandSurface& hand, const ObjectModel& obj) {
  return penetration_energy(hand.points, obj);
}

namespace {

VecX limit_violation(const GraspPose& pose, const HandModel& hand) {
  if (static_cast<std::size_t>(pose.joints.size()) != hand.dof()) {
    throw DimensionError("pose dimension does not match hand '" + hand.name() + "'");
  }
  VecX r(pose.joints.size());
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    const auto& js = hand.joints()[j];
    r(j) = std::max(0.0, pose.joints(j) - js.upper_limit) + std::max(0.0, js.lower_limit - pose.joints(j));
  }
  return r;
}

}  // namespace

double prior_energy(const GraspPose& pose, const HandModel& hand) {
  return limit_violation(pose, hand).norm();
}

VecX prior_gradient(const GraspPose& pose, const HandModel& hand) {
  const VecX r = limit_violation(pose, hand);
  VecX g = VecX::Zero(r.size());
  const double norm = r.norm();
  if (norm == 0.0) return g;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    const auto& js = hand.joints()[j];
    if (pose.joints(j) > js.upper_limit) g(j) = r(j) / norm;
    if (pose.joints(j) < js.lower_limit) g(j) = -r(j) / norm;
  }
  return g;
}

double contact_match_energy(const ContactMap& current, const ContactMap& goal) {
  if (current.values.size() != goal.values.size()) {
    throw DimensionError("contact maps differ in length (" + std::to_string(current.values.size()) +
                         " vs " + std::to_string(goal.values.size()) + ")");
  }
  if (current.values.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < current.values.size(); ++i) {
    const double d = current.values[i] - goal.values[i];
    s += d * d;
  }
  return s / static_cast<double>(current.values.size());
}

nlohmann::json to_json(const EnergyWeights& w) {
  return {{"dfc", w.dfc},   {"pen", w.pen},   {"prior", w.prior},
          {"contact", w.contact}, {"dist", w.dist}, {"dist_width", w.dist_width}};
}

EnergyWeights weights_from_json(const nlohmann::json& j, EnergyWeights d) {
  d.dfc = j.value("dfc", d.dfc);
  d.pen = j.value("pen", d.pen);
  d.prior = j.value("prior", d.prior);
  d.contact = j.value("contact", d.contact);
  d.dist = j.value("dist", d.dist);
  d.dist_width = j.value("dist_width", d.dist_width);
  return d;
}

nlohmann::json to_json(const EnergyBreakdown& e) {
  return {{"dfc_norm", e.dfc_norm}, {"e_pen", e.e_pen},     {"e_prior", e.e_prior},
          {"e_contact", e.e_contact}, {"e_dist", e.e_dist}, {"total", e.total},
          {"weights", to_json(e.weights)}};
}

VecX GraspState::flat() const {
  const VecX q = pose.flat();
  VecX x(q.size() + 2 * static_cast<Eigen::Index>(regions.size()));
  x.head(q.size()) = q;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    x(q.size() + 2 * i) = regions[i].u;
    x(q.size() + 2 * i + 1) = regions[i].v;
  }
  return x;
}

void GraspState::set_flat(const VecX& x) {
  const Eigen::Index nq = x.size() - 2 * static_cast<Eigen::Index>(regions.size());
  pose = GraspPose::from_flat(x.head(nq));
  for (std::size_t i = 0; i < regions.size(); ++i) {
    regions[i].u = x(nq + 2 * i);
    regions[i].v = x(nq + 2 * i + 1);
  }
}

GraspEnergy::GraspEnergy(const HandModel& hand, const ObjectModel& obj, EnergyWeights weights)
    : hand_(hand), obj_(obj), mode_(EnergyMode::synthesis), weights_(weights) {}

GraspEnergy::GraspEnergy(const HandModel& hand, const ObjectModel& obj, const ContactMap& goal,
                         EnergyWeights weights, DistanceMetric metric, double gamma,
                         double distance_scale, double distance_cutoff)
    : hand_(hand), obj_(obj), mode_(EnergyMode::transfer), weights_(weights), goal_(goal.values) {
  if (goal.values.size() != obj.surface_points().size()) {
    throw DimensionError("goal map has " + std::to_string(goal.values.size()) + " values, object '" +
                         obj.name() + "' has " + std::to_string(obj.surface_points().size()) +
                         " samples");
  }
  if (!goal.object.empty() && goal.object != obj.name()) {
    throw std::invalid_argument("goal map belongs to '" + goal.object + "', not '" + obj.name() + "'");
  }
  evaluator_.emplace(obj, hand, metric, gamma, distance_scale, distance_cutoff);
}

EnergyBreakdown GraspEnergy::evaluate(const GraspState& state, VecX* gradient, Workspace* ws) const {
  const GraspPose& pose = state.pose;
  const KinematicFrames frames = forward_kinematics(hand_, pose);
  const HandSurface surface = hand_surface(hand_, frames);
  const MeshDistanceField& field = obj_.distance_field();
  const bool want_grad = gradient != nullptr;
  PoseGradient acc(hand_, frames);
  const Eigen::Index nq = 6 + static_cast<Eigen::Index>(hand_.dof());
  VecX g_regions = VecX::Zero(2 * static_cast<Eigen::Index>(state.regions.size()));

  EnergyBreakdown e;
  e.weights = weights_;

  // Penetration of hand samples.
  for (Eigen::Index k = 0; k < surface.points.cols(); ++k) {
    const Vec3 x = surface.points.col(k);
    if (field.distance_lower_bound(x) > 0.0) continue;
    const DistanceQuery q = field.query(x);
    if (q.distance >= 0.0) continue;
    e.e_pen -= q.distance;
    if (want_grad) acc.add(hand_.sample_link()[k], x, -weights_.pen * q.gradient);
  }

  e.e_prior = prior_energy(pose, hand_);

  if (mode_ == EnergyMode::synthesis) {
    if (state.regions.size() < 2) throw DimensionError("synthesis needs at least two contact regions");
    const std::vector<Vec3> x = sample_contact_points(hand_, frames, state.regions);
    std::vector<Vec3> c(x.size());
    std::vector<DistanceQuery> qs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      qs[i] = field.query(x[i]);
      c[i] = qs[i].gradient;
      e.e_dist += std::hypot(qs[i].distance, weights_.dist_width) - weights_.dist_width;
    }
    const Vec6 w = dfc_wrench(x, c);
    e.dfc_norm = w.norm();
    if (want_grad) {
      const Vec6 gw = e.dfc_norm > 0.0 ? Vec6(w / e.dfc_norm) : Vec6::Zero();
      const Vec3 gf = gw.head<3>(), gt = gw.tail<3>();
      for (std::size_t i = 0; i < x.size(); ++i) {
        const Mat3 J = field.gradient_jacobian(x[i], qs[i]);
        Vec3 dx = weights_.dfc * (J * (gf - x[i].cross(gt)) + c[i].cross(gt));
        const double r = std::hypot(qs[i].distance, weights_.dist_width);
        if (r > 0.0) dx += weights_.dist * qs[i].distance / r * c[i];
        const int region = state.regions[i].region;
        const int link = hand_.region_link_index(region);
        acc.add(link, x[i], dx);
        const Mat3 R = frames.links[link].linear();
        const auto& spec = hand_.contact_regions()[region];
        g_regions(2 * i) = dx.dot(R * spec.edge1);
        g_regions(2 * i + 1) = dx.dot(R * spec.edge2);
      }
    }
    e.total = weights_.dfc * e.dfc_norm + weights_.pen * e.e_pen + weights_.prior * e.e_prior +
              weights_.dist * e.e_dist;
  } else {
    Workspace local;
    Workspace& w = ws ? *ws : local;
    evaluator_->evaluate(frames, surface, w.cmap, ws ? &w.hint : nullptr);
    const std::size_t m = goal_.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double D = w.cmap.distance[i];
      const double diff = contact_value(D) - goal_[i];
      sum += diff * diff;
      if (want_grad && weights_.contact != 0.0) {
        const double dE_dD = weights_.contact * 2.0 * diff / static_cast<double>(m) * contact_value_derivative(D);
        const int k = w.cmap.argmin[i];
        if (dE_dD != 0.0 && k >= 0) {
          acc.add(hand_.sample_link()[k], surface.points.col(k),
                  dE_dD * evaluator_->distance_gradient(i, surface, w.cmap));
        }
      }
    }
    e.e_contact = m ? sum / static_cast<double>(m) : 0.0;
    if (ws) ws->hint = w.cmap.argmin;
    e.total = weights_.contact * e.e_contact + weights_.pen * e.e_pen + weights_.prior * e.e_prior;
  }

  if (want_grad) {
    VecX g(nq + g_regions.size());
    g.head(nq) = acc.finish(pose);
    g.segment(6, static_cast<Eigen::Index>(hand_.dof())) += weights_.prior * prior_gradient(pose, hand_);
    g.tail(g_regions.size()) = g_regions;
    *gradient = std::move(g);
  }
  return e;
}

}  // namespace dexmap
