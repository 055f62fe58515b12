#include "dexmap/hand_model.hpp"

#include "dexmap/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dexmap {

namespace {

constexpr double kGoldenAngle = 2.39996322972865332;  // pi * (3 - sqrt(5))
constexpr int kMaxClusterSize = 48;

// Fibonacci points on the unit sphere with z restricted to [z_lo, z_hi].
std::vector<Vec3> fibonacci_band(int n, double z_lo, double z_hi) {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double z = z_hi - (z_hi - z_lo) * (k + 0.5) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = kGoldenAngle * k;
    out.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
  }
  return out;
}

std::vector<SurfacePoint> sample_local(const Primitive& prim, double spacing) {
  std::vector<SurfacePoint> out;
  const double s2 = spacing * spacing;
  switch (prim.kind) {
    case PrimitiveKind::sphere: {
      const double r = prim.dims.x();
      const int n = std::max(12, static_cast<int>(std::lround(4.0 * M_PI * r * r / s2)));
      for (const Vec3& d : fibonacci_band(n, -1.0, 1.0)) out.push_back({r * d, d});
      break;
    }
    case PrimitiveKind::capsule: {
      const double r = prim.dims.x(), len = prim.dims.y();
      const int around = std::max(8, static_cast<int>(std::lround(2.0 * M_PI * r / spacing)));
      const int rings = std::max(2, static_cast<int>(std::lround(len / spacing)) + 1);
      for (int i = 0; i < rings; ++i) {
        const double z = -0.5 * len + len * i / (rings - 1);
        const double offset = (i % 2) * M_PI / around;
        for (int j = 0; j < around; ++j) {
          const double phi = offset + 2.0 * M_PI * j / around;
          const Vec3 d(std::cos(phi), std::sin(phi), 0.0);
          out.push_back({r * d + Vec3(0, 0, z), d});
        }
      }
      const int cap = std::max(6, static_cast<int>(std::lround(2.0 * M_PI * r * r / s2)));
      for (const Vec3& d : fibonacci_band(cap, 0.0, 1.0)) {
        out.push_back({r * d + Vec3(0, 0, 0.5 * len), d});
        const Vec3 m(d.x(), d.y(), -d.z());
        out.push_back({r * m - Vec3(0, 0, 0.5 * len), m});
      }
      break;
    }
    case PrimitiveKind::box: {
      const Vec3 h = 0.5 * prim.dims;
      for (int axis = 0; axis < 3; ++axis) {
        const int a = (axis + 1) % 3, b = (axis + 2) % 3;
        const int na = std::max(1, static_cast<int>(std::lround(prim.dims(a) / spacing)));
        const int nb = std::max(1, static_cast<int>(std::lround(prim.dims(b) / spacing)));
        for (int side : {1, -1}) {
          for (int i = 0; i < na; ++i) {
            for (int j = 0; j < nb; ++j) {
              Vec3 p, n = Vec3::Zero();
              p(axis) = side * h(axis);
              p(a) = -h(a) + prim.dims(a) * (i + 0.5) / na;
              p(b) = -h(b) + prim.dims(b) * (j + 0.5) / nb;
              n(axis) = side;
              out.push_back({p, n});
            }
          }
        }
      }
      break;
    }
  }
  return out;
}

bool dims_valid(const Primitive& p) {
  const int used = p.kind == PrimitiveKind::sphere ? 1 : p.kind == PrimitiveKind::capsule ? 2 : 3;
  return (p.dims.head(used).array() > 0.0).all();
}

Vec3 read_vec3(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ParseError(what + ": expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Transform read_transform(const nlohmann::json& j) {
  if (j.is_null()) return Transform::Identity();
  const Vec3 xyz = j.contains("xyz") ? read_vec3(j["xyz"], "xyz") : Vec3::Zero();
  const Vec3 rpy = j.contains("rpy") ? read_vec3(j["rpy"], "rpy") : Vec3::Zero();
  return make_transform(rotation_from_rpy(rpy), xyz);
}

PrimitiveKind read_kind(const std::string& s) {
  if (s == "sphere") return PrimitiveKind::sphere;
  if (s == "capsule") return PrimitiveKind::capsule;
  if (s == "box") return PrimitiveKind::box;
  throw ParseError("unknown primitive kind '" + s + "'");
}

// Median split along the longest extent until every run is small enough.
void split_cluster(std::vector<SurfacePoint>& samples, int begin, int end, int link,
                   std::vector<SampleCluster>& out) {
  if (end - begin > kMaxClusterSize) {
    Eigen::AlignedBox3d box;
    for (int i = begin; i < end; ++i) box.extend(samples[i].position);
    int axis = 0;
    box.sizes().maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::stable_sort(samples.begin() + begin, samples.begin() + end,
                     [axis](const SurfacePoint& a, const SurfacePoint& b) {
                       return a.position(axis) < b.position(axis);
                     });
    split_cluster(samples, begin, mid, link, out);
    split_cluster(samples, mid, end, link, out);
    return;
  }
  std::vector<Vec3> pts;
  for (int i = begin; i < end; ++i) pts.push_back(samples[i].position);
  const Sphere s = min_enclosing_sphere(std::span<const Vec3>(pts));
  out.push_back({link, begin, end, s.center, s.radius});
}

}  // namespace

double Primitive::signed_distance(const Vec3& p_link) const {
  const Vec3 p = local.inverse() * p_link;
  switch (kind) {
    case PrimitiveKind::sphere: return p.norm() - dims.x();
    case PrimitiveKind::capsule: {
      const double h = 0.5 * dims.y();
      const Vec3 axis_point(0.0, 0.0, std::clamp(p.z(), -h, h));
      return (p - axis_point).norm() - dims.x();
    }
    case PrimitiveKind::box: {
      const Vec3 q = p.cwiseAbs() - 0.5 * dims;
      return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
    }
  }
  return 0.0;
}

std::vector<SurfacePoint> sample_primitive(const Primitive& prim, double spacing) {
  std::vector<SurfacePoint> out = sample_local(prim, spacing);
  for (auto& s : out) {
    s.position = prim.local * s.position;
    s.normal = prim.local.linear() * s.normal;
  }
  return out;
}

HandModel::HandModel(std::string name, std::vector<LinkGeometry> links,
                     std::vector<JointSpec> joints, std::string palm_link,
                     Vec3 palm_backward_direction, std::vector<ContactRegionSpec> contact_regions,
                     double sample_spacing, int synthesis_contacts)
    : name_(std::move(name)),
      links_(std::move(links)),
      joints_(std::move(joints)),
      palm_link_(std::move(palm_link)),
      palm_backward_(std::move(palm_backward_direction)),
      regions_(std::move(contact_regions)),
      sample_spacing_(sample_spacing),
      synthesis_contacts_(synthesis_contacts) {
  validate_and_index();
  build_clusters();
}

void HandModel::validate_and_index() {
  const std::string who = "hand '" + name_ + "': ";
  if (links_.empty()) throw ValidationError(who + "no links");
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (!link_index_.emplace(links_[i].link_name, static_cast<int>(i)).second) {
      throw ValidationError(who + "duplicate link '" + links_[i].link_name + "'");
    }
    for (const auto& p : links_[i].primitives) {
      if (!dims_valid(p)) {
        throw ValidationError(who + "non-positive primitive dimension on '" + links_[i].link_name + "'");
      }
    }
    for (const auto& s : links_[i].surface_samples) {
      if (std::abs(s.normal.norm() - 1.0) > 1e-9) {
        throw ValidationError(who + "non-unit sample normal on '" + links_[i].link_name + "'");
      }
    }
  }
  if (!link_index_.count(palm_link_)) throw ValidationError(who + "palm link '" + palm_link_ + "' missing");
  if (std::abs(palm_backward_.norm() - 1.0) > 1e-9) {
    throw ValidationError(who + "palm_backward_direction must be a unit vector");
  }
  if (!(sample_spacing_ > 0.0)) throw ValidationError(who + "sample_spacing must be positive");

  std::vector<int> parent_joint(links_.size(), -1);
  for (std::size_t j = 0; j < joints_.size(); ++j) {
    const auto& js = joints_[j];
    const auto p = link_index_.find(js.parent_link), c = link_index_.find(js.child_link);
    if (p == link_index_.end() || c == link_index_.end()) {
      throw ValidationError(who + "joint '" + js.name + "' references an unknown link");
    }
    if (std::abs(js.axis.norm() - 1.0) > 1e-9) {
      throw ValidationError(who + "joint '" + js.name + "' axis is not unit length");
    }
    if (!(js.lower_limit < js.upper_limit)) {
      throw ValidationError(who + "joint '" + js.name + "' has lower_limit >= upper_limit");
    }
    if (parent_joint[c->second] >= 0) {
      throw ValidationError(who + "link '" + js.child_link + "' has two parent joints");
    }
    parent_joint[c->second] = static_cast<int>(j);
    joint_parent_.push_back(p->second);
    joint_child_.push_back(c->second);
  }
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (parent_joint[i] < 0) {
      if (root_ >= 0) throw ValidationError(who + "joint graph has more than one root");
      root_ = static_cast<int>(i);
    }
  }
  if (root_ < 0) throw ValidationError(who + "joint graph is cyclic (no root link)");

  // Breadth-first from the root; links never reached sit on a cycle.
  std::vector<bool> placed(links_.size(), false);
  placed[root_] = true;
  std::vector<int> frontier{root_};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (std::size_t j = 0; j < joints_.size(); ++j) {
      if (std::find(frontier.begin(), frontier.end(), joint_parent_[j]) == frontier.end()) continue;
      joint_order_.push_back(static_cast<int>(j));
      placed[joint_child_[j]] = true;
      next.push_back(joint_child_[j]);
    }
    frontier = std::move(next);
  }
  if (std::find(placed.begin(), placed.end(), false) != placed.end()) {
    throw ValidationError(who + "joint graph is cyclic");
  }

  for (const auto& r : regions_) {
    const auto it = link_index_.find(r.link_name);
    if (it == link_index_.end()) {
      throw ValidationError(who + "contact region on unknown link '" + r.link_name + "'");
    }
    if (r.edge1.cross(r.edge2).norm() <= 1e-12 * std::max(1e-12, r.edge1.norm() * r.edge2.norm())) {
      throw ValidationError(who + "contact region edges on '" + r.link_name + "' are dependent");
    }
    region_link_.push_back(it->second);
  }
  if (synthesis_contacts_ < 0 || synthesis_contacts_ > static_cast<int>(regions_.size())) {
    throw ValidationError(who + "synthesis_contacts exceeds the number of contact regions");
  }
}

void HandModel::build_clusters() {
  int offset = 0;
  for (std::size_t l = 0; l < links_.size(); ++l) {
    link_offset_.push_back(offset);
    auto& samples = links_[l].surface_samples;
    const int n = static_cast<int>(samples.size());
    const std::size_t first = clusters_.size();
    split_cluster(samples, 0, n, static_cast<int>(l), clusters_);
    for (std::size_t c = first; c < clusters_.size(); ++c) {
      clusters_[c].begin += offset;
      clusters_[c].end += offset;
    }
    sample_link_.insert(sample_link_.end(), samples.size(), static_cast<int>(l));
    offset += n;
  }
  link_offset_.push_back(offset);
}

int HandModel::link_index(const std::string& name) const {
  const auto it = link_index_.find(name);
  return it == link_index_.end() ? -1 : it->second;
}

VecX HandModel::lower_limits() const {
  VecX v(joints_.size());
  for (std::size_t j = 0; j < joints_.size(); ++j) v(j) = joints_[j].lower_limit;
  return v;
}

VecX HandModel::upper_limits() const {
  VecX v(joints_.size());
  for (std::size_t j = 0; j < joints_.size(); ++j) v(j) = joints_[j].upper_limit;
  return v;
}

VecX HandModel::mid_range() const { return 0.5 * (lower_limits() + upper_limits()); }

HandModel parse_hand_model(const std::string& json_text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
  try {
    const double spacing = doc.value("sample_spacing", 0.005);
    std::vector<LinkGeometry> links;
    for (const auto& jl : doc.at("links")) {
      LinkGeometry lg;
      lg.link_name = jl.at("name").get<std::string>();
      for (const auto& jp : jl.value("primitives", nlohmann::json::array())) {
        Primitive p;
        p.kind = read_kind(jp.at("kind").get<std::string>());
        p.local = read_transform(jp.value("transform", nlohmann::json()));
        const auto& d = jp.at("dims");
        if (!d.is_array() || d.empty() || d.size() > 3) throw ParseError("dims: 1 to 3 numbers");
        for (std::size_t k = 0; k < d.size(); ++k) p.dims(static_cast<Eigen::Index>(k)) = d[k].get<double>();
        lg.primitives.push_back(p);
      }
      // Deterministic samples; points buried in a sibling primitive are dropped.
      for (std::size_t i = 0; i < lg.primitives.size(); ++i) {
        if (!dims_valid(lg.primitives[i])) continue;
        for (const auto& s : sample_primitive(lg.primitives[i], spacing)) {
          bool buried = false;
          for (std::size_t k = 0; k < lg.primitives.size() && !buried; ++k) {
            buried = k != i && lg.primitives[k].signed_distance(s.position) < -1e-9;
          }
          if (!buried) lg.surface_samples.push_back(s);
        }
      }
      links.push_back(std::move(lg));
    }
    std::vector<JointSpec> joints;
    for (const auto& jj : doc.value("joints", nlohmann::json::array())) {
      JointSpec js;
      js.name = jj.at("name").get<std::string>();
      js.parent_link = jj.at("parent").get<std::string>();
      js.child_link = jj.at("child").get<std::string>();
      js.origin = read_transform(jj.value("origin", nlohmann::json()));
      js.axis = read_vec3(jj.at("axis"), "axis");
      const auto& lim = jj.at("limits");
      if (!lim.is_array() || lim.size() != 2) throw ParseError("limits: expected [lower, upper]");
      js.lower_limit = lim[0].get<double>();
      js.upper_limit = lim[1].get<double>();
      joints.push_back(js);
    }
    std::vector<ContactRegionSpec> regions;
    for (const auto& jr : doc.value("contact_regions", nlohmann::json::array())) {
      regions.push_back({jr.at("link").get<std::string>(), read_vec3(jr.at("origin"), "origin"),
                         read_vec3(jr.at("edge1"), "edge1"), read_vec3(jr.at("edge2"), "edge2")});
    }
    const int n_contacts = doc.value("synthesis_contacts", static_cast<int>(regions.size()));
    return HandModel(doc.at("name").get<std::string>(), std::move(links), std::move(joints),
                     doc.at("palm_link").get<std::string>(),
                     read_vec3(doc.at("palm_backward_direction"), "palm_backward_direction"),
                     std::move(regions), spacing, n_contacts);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
}

HandModel load_hand_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_hand_model(ss.str(), path.string());
}

}  // namespace dexmap
