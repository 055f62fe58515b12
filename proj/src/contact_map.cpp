#include "dexmap/contact_map.hpp"

#include "dexmap/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dexmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// D for one (object point, hand point) pair; `n` is the alignment normal.
inline double pair_distance(const Vec3& w, const Vec3& n, double gamma, double scale, bool aligned) {
  const double d = w.norm();
  if (d == 0.0) return 0.0;
  const double base = std::sqrt(scale * d);
  if (!aligned) return base;
  return std::exp(gamma * (1.0 - w.dot(n) / d)) * base;
}

// Lower bound of D over hand points inside the ball (c, rho); false when the
// bound already reaches `best`.
inline bool ball_may_improve(const Vec3& p, const Vec3& n, const Vec3& c, double rho, double best,
                             double gamma, double scale, bool aligned) {
  const Vec3 w = p - c;
  const double L2 = w.squaredNorm();
  if (L2 <= rho * rho) return true;
  const double L = std::sqrt(L2);
  const double base = std::sqrt(scale * (L - rho));
  if (base >= best) return false;
  if (!aligned || gamma == 0.0) return true;
  // The direction to any point of the ball deviates from w by at most alpha.
  const double cos_t = w.dot(n) / L;
  const double sin_a = rho / L;
  const double cos_a = std::sqrt(1.0 - sin_a * sin_a);
  if (cos_t >= cos_a) return true;
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  const double x = gamma * (1.0 - (cos_t * cos_a + sin_t * sin_a));
  if ((1.0 + x * (1.0 + x * (0.5 + x / 6.0))) * base >= best) return false;
  return std::exp(x) * base < best;
}

}  // namespace

std::string to_string(DistanceMetric m) { return m == DistanceMetric::aligned ? "aligned" : "euclidean"; }

DistanceMetric metric_from_string(const std::string& s) {
  if (s == "aligned") return DistanceMetric::aligned;
  if (s == "euclidean") return DistanceMetric::euclidean;
  throw std::invalid_argument("unknown metric '" + s + "' (expected aligned or euclidean)");
}

double aligned_distance(const SurfacePoint& v_o, const Eigen::Matrix3Xd& hand_points, double gamma,
                        double distance_scale) {
  if (hand_points.cols() == 0) throw std::invalid_argument("aligned_distance: empty hand surface");
  if (!(gamma >= 0.0)) throw std::invalid_argument("aligned_distance: gamma must be >= 0");
  double best = kInf;
  for (Eigen::Index k = 0; k < hand_points.cols(); ++k) {
    best = std::min(best, pair_distance(v_o.position - hand_points.col(k), v_o.normal, gamma,
                                        distance_scale, true));
  }
  return best;
}

double euclidean_distance(const Vec3& v_o, const Eigen::Matrix3Xd& hand_points, double distance_scale) {
  if (hand_points.cols() == 0) throw std::invalid_argument("euclidean_distance: empty hand surface");
  double best = kInf;
  for (Eigen::Index k = 0; k < hand_points.cols(); ++k) {
    best = std::min(best, pair_distance(v_o - hand_points.col(k), Vec3::Zero(), 0.0, distance_scale, false));
  }
  return best;
}

double contact_value(double distance) {
  if (distance < 0.0 || std::isnan(distance)) throw std::domain_error("contact_value: negative distance");
  // 1 - 2 (sigmoid(D) - 1/2) == 2 sigmoid(-D), written to keep precision for large D.
  return 2.0 / (1.0 + std::exp(distance));
}

double contact_value_derivative(double distance) {
  const double s = 1.0 / (1.0 + std::exp(-distance));
  return -2.0 * s * (1.0 - s);
}

ContactMap sharpen_map(const ContactMap& map) {
  ContactMap out = map;
  for (double& v : out.values) {
    if (v >= 0.5) v = 1.0;
  }
  return out;
}

ContactMap contact_map(const ObjectModel& obj, const HandSurface& hand, DistanceMetric metric,
                       double gamma, double distance_scale) {
  if (obj.surface_points().empty()) throw std::invalid_argument("contact_map: object has no samples");
  ContactMap m{obj.name(), metric, gamma, distance_scale, {}};
  m.values.reserve(obj.surface_points().size());
  for (const auto& s : obj.surface_points()) {
    const double D = metric == DistanceMetric::aligned
                         ? aligned_distance({s.position, -s.normal}, hand.points, gamma, distance_scale)
                         : euclidean_distance(s.position, hand.points, distance_scale);
    m.values.push_back(contact_value(D));
  }
  return m;
}

ContactMapEvaluator::ContactMapEvaluator(const ObjectModel& obj, const HandModel& hand,
                                         DistanceMetric metric, double gamma, double distance_scale,
                                         double cutoff)
    : obj_(obj), hand_(hand), metric_(metric), gamma_(gamma), scale_(distance_scale), cutoff_(cutoff) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("cutoff must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(distance_scale > 0.0)) throw std::invalid_argument("distance_scale must be > 0");
  if (hand.sample_count() == 0) throw std::invalid_argument("hand has no surface samples");
  const auto& clusters = hand.clusters();
  std::size_t c = 0;
  for (std::size_t l = 0; l < hand.links().size(); ++l) {
    LinkBall ball{Vec3::Zero(), -1.0, static_cast<int>(c), static_cast<int>(c)};
    while (c < clusters.size() && clusters[c].link == static_cast<int>(l)) ++c;
    ball.end_cluster = static_cast<int>(c);
    const auto& samples = hand.links()[l].surface_samples;
    if (!samples.empty()) {
      std::vector<Vec3> pts;
      for (const auto& s : samples) pts.push_back(s.position);
      const Sphere s = min_enclosing_sphere(std::span<const Vec3>(pts));
      ball.center = s.center;
      ball.radius = s.radius;
    }
    links_.push_back(ball);
  }
  for (const auto& s : obj.surface_points()) inward_.push_back(-s.normal);
}

void ContactMapEvaluator::evaluate(const KinematicFrames& frames, const HandSurface& hand,
                                   Result& out, const std::vector<int>* hint) const {
  const bool aligned = metric_ == DistanceMetric::aligned;
  const auto& pts = obj_.surface_points();
  const auto& clusters = hand_.clusters();
  std::vector<Vec3> link_center(links_.size()), cluster_center(clusters.size());
  for (std::size_t l = 0; l < links_.size(); ++l) link_center[l] = frames.links[l] * links_[l].center;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    cluster_center[c] = frames.links[clusters[c].link] * clusters[c].center;
  }
  out.distance.assign(pts.size(), kInf);
  out.argmin.assign(pts.size(), -1);
  const bool use_hint = hint != nullptr && hint->size() == pts.size();

  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3& p = pts[i].position;
    const Vec3& n = inward_[i];
    double best = cutoff_;
    int arg = -1;
    auto consider = [&](int k) {
      const Vec3 w = p - hand.points.col(k);
      if (aligned && best < kInf) {
        const double d = w.norm();
        if (d > 0.0) {
          // Partial Taylor sums bound exp(x) from below for x >= 0.
          const double x = gamma_ * (1.0 - w.dot(n) / d);
          if ((1.0 + x * (1.0 + x * (0.5 + x / 6.0))) * std::sqrt(scale_ * d) > best) return;
        }
      }
      const double D = pair_distance(w, n, gamma_, scale_, aligned);
      if (D < best || (D == best && k < arg)) {
        best = D;
        arg = k;
      }
    };
    if (use_hint && (*hint)[i] >= 0 && static_cast<std::size_t>((*hint)[i]) < hand.size()) {
      consider((*hint)[i]);
    }
    for (std::size_t l = 0; l < links_.size(); ++l) {
      const LinkBall& lb = links_[l];
      if (lb.radius < 0.0) continue;
      if (!ball_may_improve(p, n, link_center[l], lb.radius, best, gamma_, scale_, aligned)) continue;
      for (int c = lb.first_cluster; c < lb.end_cluster; ++c) {
        if (!ball_may_improve(p, n, cluster_center[c], clusters[c].radius, best, gamma_, scale_, aligned)) {
          continue;
        }
        for (int k = clusters[c].begin; k < clusters[c].end; ++k) {
          // Cheap reject: sqrt(scale d) alone already exceeds best.
          const double limit = best * best / scale_;
          if ((p - hand.points.col(k)).squaredNorm() > limit * limit) continue;
          consider(k);
        }
      }
    }
    out.distance[i] = best;
    out.argmin[i] = arg;
  }
}

Vec3 ContactMapEvaluator::distance_gradient(std::size_t i, const HandSurface& hand,
                                            const Result& r) const {
  const int k = r.argmin[i];
  if (k < 0) return Vec3::Zero();
  const Vec3 w = obj_.surface_points()[i].position - hand.points.col(k);
  const double d = w.norm();
  const double D = r.distance[i];
  if (d == 0.0 || D == 0.0) return Vec3::Zero();
  const Vec3 u = w / d;
  Vec3 dD_dw = 0.5 * D / d * u;
  if (metric_ == DistanceMetric::aligned) {
    const Vec3& n = inward_[i];
    dD_dw -= gamma_ * D / d * (n - u.dot(n) * u);
  }
  return -dD_dw;  // w = v_o - v_h
}

ContactMap ContactMapEvaluator::to_map(const Result& r) const {
  ContactMap m{obj_.name(), metric_, gamma_, scale_, {}};
  m.values.reserve(r.distance.size());
  for (double D : r.distance) m.values.push_back(contact_value(D));
  return m;
}

nlohmann::json to_json(const ContactMap& map) {
  return {{"object", map.object},
          {"metric", to_string(map.metric)},
          {"gamma", map.gamma},
          {"distance_scale", map.distance_scale},
          {"values", map.values}};
}

ContactMap contact_map_from_json(const nlohmann::json& j) {
  ContactMap m;
  m.object = j.at("object").get<std::string>();
  m.metric = metric_from_string(j.at("metric").get<std::string>());
  m.gamma = j.at("gamma").get<double>();
  m.distance_scale = j.value("distance_scale", 1.0);
  m.values = j.at("values").get<std::vector<double>>();
  return m;
}

void write_contact_map_json(const ContactMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(map).dump() << "\n";
}

ContactMap read_contact_map_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return contact_map_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_contact_map_ply(const ContactMap& map, const ObjectModel& obj,
                           const std::filesystem::path& path) {
  if (map.values.size() != obj.surface_points().size()) {
    throw DimensionError("contact map length does not match the object samples");
  }
  std::vector<Vec3> p, n;
  for (const auto& s : obj.surface_points()) {
    p.push_back(s.position);
    n.push_back(s.normal);
  }
  write_point_ply(path, p, n, std::span<const double>(map.values));
}

}  // namespace dexmap
