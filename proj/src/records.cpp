#include "dexmap/records.hpp"

#include "dexmap/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace dexmap {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json vec(const VecX& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VecX vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const VecX>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec3 vec3_from(const json& j) {
  const VecX v = vec_from(j);
  if (v.size() != 3) throw json::other_error::create(501, "expected a 3-vector", &j);
  return v;
}

// JSON has no infinity; null stands for +inf in configs and NaN in lists.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double or_inf(const json& j, const char* key, double d) {
  if (!j.contains(key)) return d;
  return j.at(key).is_null() ? kInf : j.at(key).get<double>();
}

std::vector<double> nan_list(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(x.is_null() ? kNaN : x.get<double>());
  return out;
}

json nan_list(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(finite_or_null(x));
  return out;
}

}  // namespace

json to_json(const GraspPose& p) {
  return {{"translation", vec(p.translation)}, {"rotation", vec(p.rotation)}, {"joints", vec(p.joints)}};
}

GraspPose pose_from_json(const json& j) {
  GraspPose p;
  p.translation = vec3_from(j.at("translation"));
  p.rotation = vec3_from(j.at("rotation"));
  p.joints = vec_from(j.at("joints"));
  return p;
}

EnergyBreakdown energy_from_json(const json& j) {
  EnergyBreakdown e;
  e.dfc_norm = j.at("dfc_norm").get<double>();
  e.e_pen = j.at("e_pen").get<double>();
  e.e_prior = j.at("e_prior").get<double>();
  e.e_contact = j.at("e_contact").get<double>();
  e.e_dist = j.value("e_dist", 0.0);
  e.total = j.at("total").get<double>();
  if (j.contains("weights")) e.weights = weights_from_json(j.at("weights"));
  return e;
}

json to_json(const GraspRecord& r) {
  json regions = json::array();
  for (const auto& a : r.regions) regions.push_back({{"region", a.region}, {"u", a.u}, {"v", a.v}});
  json j = {{"type", "grasp"},
            {"hand", r.hand},
            {"object", r.object},
            {"chain", r.chain},
            {"seed", r.seed},
            {"valid", r.valid},
            {"pose", to_json(r.pose)},
            {"regions", regions},
            {"energy", to_json(r.energy)},
            {"contact_distance", r.contact_distance}};
  if (!r.contact_map.values.empty()) j["contact_map"] = to_json(r.contact_map);
  return j;
}

GraspRecord grasp_record_from_json(const json& j) {
  GraspRecord r;
  r.hand = j.at("hand").get<std::string>();
  r.object = j.at("object").get<std::string>();
  r.chain = j.value("chain", 0);
  r.seed = j.value("seed", std::uint64_t{0});
  r.valid = j.value("valid", false);
  r.pose = pose_from_json(j.at("pose"));
  for (const auto& a : j.value("regions", json::array())) {
    r.regions.push_back({a.at("region").get<int>(), a.at("u").get<double>(), a.at("v").get<double>()});
  }
  if (j.contains("energy")) r.energy = energy_from_json(j.at("energy"));
  r.contact_distance = j.value("contact_distance", 0.0);
  if (j.contains("contact_map")) r.contact_map = contact_map_from_json(j.at("contact_map"));
  return r;
}

json to_json(const TransferRecord& r) {
  const TransferResult& t = r.result;
  json traj = json::array();
  for (const auto& c : t.trajectory) traj.push_back({c.step, finite_or_null(c.best_total)});
  return {{"type", "transfer"},
          {"index", r.index},
          {"source_hand", r.source_hand},
          {"source_chain", r.source_chain},
          {"hand", r.hand},
          {"object", r.object},
          {"metric", to_string(r.metric)},
          {"seed", r.seed},
          {"best_restart", t.best_restart},
          {"best_pose", to_json(t.best_pose)},
          {"best_energy", to_json(t.best_energy)},
          {"all_final_energies", nan_list(t.all_final_energies)},
          {"initial_energies", nan_list(t.initial_energies)},
          {"trajectory", traj}};
}

TransferRecord transfer_record_from_json(const json& j) {
  TransferRecord r;
  r.index = j.value("index", 0);
  r.source_hand = j.value("source_hand", std::string());
  r.source_chain = j.value("source_chain", 0);
  r.hand = j.at("hand").get<std::string>();
  r.object = j.at("object").get<std::string>();
  r.metric = metric_from_string(j.value("metric", std::string("aligned")));
  r.seed = j.value("seed", std::uint64_t{0});
  TransferResult& t = r.result;
  t.best_restart = j.value("best_restart", -1);
  t.best_pose = pose_from_json(j.at("best_pose"));
  t.best_energy = energy_from_json(j.at("best_energy"));
  if (j.contains("all_final_energies")) t.all_final_energies = nan_list(j.at("all_final_energies"));
  if (j.contains("initial_energies")) t.initial_energies = nan_list(j.at("initial_energies"));
  for (const auto& c : j.value("trajectory", json::array())) {
    t.trajectory.push_back({c.at(0).get<int>(), c.at(1).is_null() ? kInf : c.at(1).get<double>()});
  }
  return r;
}

json to_json(const StabilityReport& r) {
  return {{"per_direction", r.per_direction},
          {"passed", r.passed},
          {"max_penetration", r.max_penetration},
          {"contact_count", r.contact_count},
          {"friction_mu", r.friction_mu},
          {"lp_failures", r.lp_failures}};
}

StabilityReport stability_report_from_json(const json& j) {
  StabilityReport r;
  r.per_direction = j.at("per_direction").get<std::array<bool, 6>>();
  r.passed = j.at("passed").get<bool>();
  r.max_penetration = j.at("max_penetration").get<double>();
  r.contact_count = j.at("contact_count").get<int>();
  r.friction_mu = j.at("friction_mu").get<double>();
  r.lp_failures = j.value("lp_failures", 0);
  return r;
}

json to_json(const DiversityStats& d) {
  return {{"per_joint_std", vec(d.per_joint_std)}, {"mean_std", d.mean_std}, {"sample_count", d.sample_count}};
}

json to_json(const MalaConfig& c) {
  return {{"step_size", c.step_size},
          {"noise_scale", c.noise_scale},
          {"temperature", c.temperature},
          {"temperature_end", c.temperature_end},
          {"steps", c.steps},
          {"batch", c.batch},
          {"seed", c.seed},
          {"switch_probability", c.switch_probability},
          {"translation_scale", c.translation_scale},
          {"rotation_scale", c.rotation_scale},
          {"joint_scale", c.joint_scale},
          {"region_scale", c.region_scale},
          {"rms_decay", c.rms_decay},
          {"rms_damping", c.rms_damping},
          {"adapt_rate", c.adapt_rate},
          {"target_acceptance", c.target_acceptance},
          {"dfc_max", c.dfc_max},
          {"pen_max", c.pen_max},
          {"prior_max", c.prior_max},
          {"contact_distance_max", finite_or_null(c.contact_distance_max)},
          {"weights", to_json(c.weights)},
          {"map_gamma", c.map_gamma},
          {"map_distance_scale", c.map_distance_scale}};
}

MalaConfig mala_config_from_json(const json& j, MalaConfig d) {
  d.step_size = j.value("step_size", d.step_size);
  d.noise_scale = j.value("noise_scale", d.noise_scale);
  d.temperature = j.value("temperature", d.temperature);
  d.temperature_end = j.value("temperature_end", d.temperature_end);
  d.steps = j.value("steps", d.steps);
  d.batch = j.value("batch", d.batch);
  d.seed = j.value("seed", d.seed);
  d.switch_probability = j.value("switch_probability", d.switch_probability);
  d.translation_scale = j.value("translation_scale", d.translation_scale);
  d.rotation_scale = j.value("rotation_scale", d.rotation_scale);
  d.joint_scale = j.value("joint_scale", d.joint_scale);
  d.region_scale = j.value("region_scale", d.region_scale);
  d.rms_decay = j.value("rms_decay", d.rms_decay);
  d.rms_damping = j.value("rms_damping", d.rms_damping);
  d.adapt_rate = j.value("adapt_rate", d.adapt_rate);
  d.target_acceptance = j.value("target_acceptance", d.target_acceptance);
  d.dfc_max = j.value("dfc_max", d.dfc_max);
  d.pen_max = j.value("pen_max", d.pen_max);
  d.prior_max = j.value("prior_max", d.prior_max);
  d.contact_distance_max = or_inf(j, "contact_distance_max", d.contact_distance_max);
  if (j.contains("weights")) d.weights = weights_from_json(j.at("weights"), d.weights);
  d.map_gamma = j.value("map_gamma", d.map_gamma);
  d.map_distance_scale = j.value("map_distance_scale", d.map_distance_scale);
  return d;
}

json to_json(const TransferConfig& c) {
  return {{"restarts", c.restarts},
          {"steps", c.steps},
          {"adam_lr", c.adam_lr},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_eps", c.adam_eps},
          {"checkpoint_every", c.checkpoint_every},
          {"seed", c.seed},
          {"weights", to_json(c.weights)},
          {"metric", to_string(c.metric)},
          {"gamma", c.gamma},
          {"distance_scale", c.distance_scale},
          {"distance_cutoff", finite_or_null(c.distance_cutoff)}};
}

TransferConfig transfer_config_from_json(const json& j, TransferConfig d) {
  d.restarts = j.value("restarts", d.restarts);
  d.steps = j.value("steps", d.steps);
  d.adam_lr = j.value("adam_lr", d.adam_lr);
  d.adam_beta1 = j.value("adam_beta1", d.adam_beta1);
  d.adam_beta2 = j.value("adam_beta2", d.adam_beta2);
  d.adam_eps = j.value("adam_eps", d.adam_eps);
  d.checkpoint_every = j.value("checkpoint_every", d.checkpoint_every);
  d.seed = j.value("seed", d.seed);
  if (j.contains("weights")) d.weights = weights_from_json(j.at("weights"), d.weights);
  if (j.contains("metric")) d.metric = metric_from_string(j.at("metric").get<std::string>());
  d.gamma = j.value("gamma", d.gamma);
  d.distance_scale = j.value("distance_scale", d.distance_scale);
  d.distance_cutoff = or_inf(j, "distance_cutoff", d.distance_cutoff);
  return d;
}

json to_json(const StabilityConfig& c) {
  return {{"friction_mu", c.friction_mu},
          {"cone_edges", c.cone_edges},
          {"object_mass", c.object_mass},
          {"acceleration", c.acceleration},
          {"contact_tolerance", c.contact_tolerance},
          {"refine_threshold", c.refine_threshold},
          {"refine_step", c.refine_step},
          {"map_gamma", c.map_gamma},
          {"map_distance_scale", c.map_distance_scale}};
}

StabilityConfig stability_config_from_json(const json& j, StabilityConfig d) {
  d.friction_mu = j.value("friction_mu", d.friction_mu);
  d.cone_edges = j.value("cone_edges", d.cone_edges);
  d.object_mass = j.value("object_mass", d.object_mass);
  d.acceleration = j.value("acceleration", d.acceleration);
  d.contact_tolerance = j.value("contact_tolerance", d.contact_tolerance);
  d.refine_threshold = j.value("refine_threshold", d.refine_threshold);
  d.refine_step = j.value("refine_step", d.refine_step);
  d.map_gamma = j.value("map_gamma", d.map_gamma);
  d.map_distance_scale = j.value("map_distance_scale", d.map_distance_scale);
  return d;
}

json make_header(const std::string& kind, std::uint64_t seed, const json& config) {
  return {{"type", "header"}, {"kind", kind}, {"tool", kToolName},
          {"version", kToolVersion}, {"seed", seed}, {"config", config}};
}

void write_jsonl(const std::filesystem::path& path, const json& header, const std::vector<json>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header.dump() << '\n';
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

JsonlContents read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  JsonlContents c;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++c.skipped;
      first = false;
      continue;
    }
    if (first && j.value("type", std::string()) == "header") {
      c.header = std::move(j);
    } else {
      c.records.push_back(std::move(j));
    }
    first = false;
  }
  return c;
}

}  // namespace dexmap
