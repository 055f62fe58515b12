// Command-line pipeline: validate, synth, transfer, eval.

#include "dexmap/errors.hpp"
#include "dexmap/parallel.hpp"
#include "dexmap/records.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dexmap;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

class AssetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string out;
  bool dry_run = false;
};

struct Pipeline {
  fs::path asset_dir = DEXMAP_ASSET_DIR;
  std::size_t object_samples = kDefaultObjectSamples;
  std::uint64_t seed = 0;
  MalaConfig synth;
  TransferConfig transfer;
  StabilityConfig eval;
};

Pipeline load_pipeline(const Common& c) {
  Pipeline p;
  json j = json::object();
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw AssetError("asset not found: " + c.config_path);
    j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(c.config_path + ": not a JSON object");
  }
  try {
    if (j.contains("asset_dir")) {
      p.asset_dir = j.at("asset_dir").get<std::string>();
      if (p.asset_dir.is_relative()) p.asset_dir = fs::path(c.config_path).parent_path() / p.asset_dir;
    }
    p.object_samples = j.value("object_samples", p.object_samples);
    p.seed = j.value("seed", p.seed);
    p.synth = mala_config_from_json(j.value("synth", json::object()));
    p.transfer = transfer_config_from_json(j.value("transfer", json::object()));
    p.eval = stability_config_from_json(j.value("eval", json::object()));
  } catch (const json::exception& e) {
    throw ParseError(c.config_path + ": " + e.what());
  }
  if (c.seed) p.seed = *c.seed;
  p.synth.seed = p.seed;
  p.transfer.seed = p.seed;
  p.synth.jobs = c.jobs;
  p.transfer.jobs = c.jobs;
  p.synth.validate();
  p.transfer.validate();
  p.eval.validate();
  return p;
}

// A bare name resolves inside the asset directory; anything else is a path.
fs::path resolve(const std::string& spec, const fs::path& dir, const std::string& ext) {
  fs::path p = spec;
  const bool bare = !p.has_parent_path() && !p.has_extension();
  if (bare) p = dir / (spec + ext);
  if (!fs::is_regular_file(p)) throw AssetError("asset not found: " + p.string());
  return p;
}

HandModel load_hand(const std::string& spec, const Pipeline& cfg) {
  return load_hand_model(resolve(spec, cfg.asset_dir / "hands", ".json"));
}

ObjectModel load_obj(const std::string& spec, const Pipeline& cfg, std::size_t samples) {
  return load_object(resolve(spec, cfg.asset_dir / "objects", ".obj"), samples);
}

void write_timing(const std::string& out, const json& timing) {
  std::ofstream f(out + ".timing.json");
  if (!f) throw std::runtime_error("cannot write " + out + ".timing.json");
  f << timing.dump(2) << '\n';
}

void require_out(const Common& c) {
  if (c.out.empty() && !c.dry_run) throw CLI::RequiredError("--out");
}

int cmd_validate(const Common& c, const std::vector<std::string>& hands, const std::vector<std::string>& objects) {
  const Pipeline cfg = load_pipeline(c);
  for (const auto& h : hands) {
    const HandModel hand = load_hand(h, cfg);
    std::printf("hand %s: %zu joints, %zu links, %zu samples\n", hand.name().c_str(), hand.dof(),
                hand.links().size(), hand.sample_count());
  }
  for (const auto& o : objects) {
    const ObjectModel obj = load_obj(o, cfg, cfg.object_samples);
    std::printf("object %s: %zu faces, closed %s, radius %.4f m\n", obj.name().c_str(), obj.mesh().faces.size(),
                obj.closed() ? "yes" : "no", obj.enclosing_sphere().radius);
  }
  return 0;
}

int cmd_synth(const Common& c, const std::string& hand_spec, const std::string& object_spec,
              std::optional<int> batch, std::optional<int> steps) {
  require_out(c);
  Pipeline cfg = load_pipeline(c);
  if (batch) cfg.synth.batch = *batch;
  if (steps) cfg.synth.steps = *steps;
  cfg.synth.validate();
  const HandModel hand = load_hand(hand_spec, cfg);
  const ObjectModel obj = load_obj(object_spec, cfg, cfg.object_samples);
  if (c.dry_run) {
    std::printf("dry run: %s on %s, %d chains x %d steps\n", hand.name().c_str(), obj.name().c_str(),
                cfg.synth.batch, cfg.synth.steps);
    return 0;
  }
  SynthesisSummary summary;
  const std::vector<GraspRecord> recs = synthesize_grasps(hand, obj, cfg.synth, &summary);
  std::vector<json> lines;
  for (const auto& r : recs) lines.push_back(to_json(r));
  const json echo = {{"hand", hand.name()},
                     {"object", obj.name()},
                     {"object_samples", cfg.object_samples},
                     {"synth", to_json(cfg.synth)}};
  write_jsonl(c.out, make_header("synth", cfg.seed, echo), lines);
  write_timing(c.out, {{"seconds", summary.seconds}, {"chains", summary.chains}, {"jobs", c.jobs}});
  double dfc_sum = 0.0;
  for (const auto& r : recs) dfc_sum += r.energy.dfc_norm;
  std::printf("%d/%d valid, acceptance %.3f, mean |Gc| %.4f, %.1f s\n", summary.valid, summary.chains,
              summary.acceptance_rate, recs.empty() ? 0.0 : dfc_sum / static_cast<double>(recs.size()),
              summary.seconds);
  return 0;
}

int cmd_transfer(const Common& c, const std::string& dataset, const std::string& hand_spec,
                 const std::string& metric, int limit) {
  require_out(c);
  Pipeline cfg = load_pipeline(c);
  if (!metric.empty()) cfg.transfer.metric = metric_from_string(metric);
  if (!fs::is_regular_file(dataset)) throw AssetError("asset not found: " + dataset);
  const HandModel hand = load_hand(hand_spec, cfg);
  const JsonlContents data = read_jsonl(dataset);
  const std::size_t samples =
      data.header.is_object() ? data.header["config"].value("object_samples", cfg.object_samples)
                              : cfg.object_samples;

  std::vector<GraspRecord> recs;
  int skipped = data.skipped;
  for (const auto& j : data.records) {
    try {
      recs.push_back(grasp_record_from_json(j));
    } catch (const json::exception&) {
      ++skipped;
    }
  }
  if (limit >= 0 && recs.size() > static_cast<std::size_t>(limit)) recs.resize(static_cast<std::size_t>(limit));
  if (skipped > 0) std::fprintf(stderr, "warning: skipped %d unparseable dataset lines\n", skipped);
  if (recs.empty()) std::fprintf(stderr, "warning: dataset has no records\n");

  std::map<std::string, ObjectModel> objects;
  std::map<std::string, HandModel> sources;
  for (const auto& r : recs) {
    if (r.contact_map.metric != cfg.transfer.metric && !sources.count(r.hand)) {
      sources.emplace(r.hand, load_hand(r.hand, cfg));
    }
    if (r.contact_map.values.empty()) throw ValidationError("record " + std::to_string(r.chain) + " has no contact map");
    if (r.contact_map.object != r.object) {
      throw ValidationError("record for '" + r.object + "' carries a map of '" + r.contact_map.object + "'");
    }
    if (!objects.count(r.object)) objects.emplace(r.object, load_obj(r.object, cfg, samples));
  }
  if (c.dry_run) {
    std::printf("dry run: %zu records to %s\n", recs.size(), hand.name().c_str());
    return 0;
  }

  std::vector<json> lines;
  json seconds = json::array();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const GraspRecord& r = recs[i];
    TransferConfig tc = cfg.transfer;
    Rng rng = make_rng(cfg.seed, stream_id("cli.transfer"), i);
    tc.seed = rng();
    TransferRecord out;
    out.index = static_cast<int>(i);
    out.source_hand = r.hand;
    out.source_chain = r.chain;
    out.hand = hand.name();
    out.object = r.object;
    out.metric = tc.metric;
    out.seed = tc.seed;
    const ObjectModel& obj = objects.at(r.object);
    // A different metric needs the source map recomputed from the source pose.
    const ContactMap goal =
        r.contact_map.metric == tc.metric
            ? r.contact_map
            : contact_map(obj, hand_surface(sources.at(r.hand), r.pose), tc.metric, r.contact_map.gamma,
                          r.contact_map.distance_scale);
    out.result = optimize_to_map(hand, obj, goal, tc);
    seconds.push_back(out.result.seconds);
    lines.push_back(to_json(out));
    std::printf("[%zu/%zu] %s E_c %.5f total %.4f %.1f s\n", i + 1, recs.size(), r.object.c_str(),
                out.result.best_energy.e_contact, out.result.best_energy.total, out.result.seconds);
  }
  const json echo = {{"hand", hand.name()},
                     {"object_samples", samples},
                     {"limit", limit},
                     {"transfer", to_json(cfg.transfer)},
                     {"source", data.header}};
  write_jsonl(c.out, make_header("transfer", cfg.seed, echo), lines);
  write_timing(c.out, {{"seconds", seconds}, {"jobs", c.jobs}});
  return 0;
}

int cmd_eval(const Common& c, const std::string& results, std::string csv) {
  require_out(c);
  const Pipeline cfg = load_pipeline(c);
  if (!fs::is_regular_file(results)) throw AssetError("asset not found: " + results);
  const JsonlContents data = read_jsonl(results);
  const std::size_t samples =
      data.header.is_object() ? data.header["config"].value("object_samples", cfg.object_samples)
                              : cfg.object_samples;
  std::vector<TransferRecord> recs;
  int skipped = data.skipped;
  for (const auto& j : data.records) {
    try {
      recs.push_back(transfer_record_from_json(j));
    } catch (const std::exception&) {
      ++skipped;
    }
  }
  if (skipped > 0) std::fprintf(stderr, "warning: skipped %d unparseable result lines\n", skipped);
  if (recs.empty()) std::fprintf(stderr, "warning: no results to evaluate\n");

  std::map<std::string, HandModel> hands;
  std::map<std::string, ObjectModel> objects;
  for (const auto& r : recs) {
    if (!hands.count(r.hand)) hands.emplace(r.hand, load_hand(r.hand, cfg));
    if (!objects.count(r.object)) objects.emplace(r.object, load_obj(r.object, cfg, samples));
  }
  if (c.dry_run) {
    std::printf("dry run: %zu results\n", recs.size());
    return 0;
  }

  std::vector<StabilityReport> reports(recs.size());
  std::vector<GraspPose> refined(recs.size());
  parallel_for(recs.size(), c.jobs, [&](std::size_t i) {
    reports[i] = evaluate_grasp(hands.at(recs[i].hand), objects.at(recs[i].object), recs[i].result.best_pose,
                                cfg.eval, &refined[i]);
  });

  // Transfer wall-clock comes from the results' timing sidecar when present.
  std::vector<double> seconds;
  {
    std::ifstream t(results + ".timing.json");
    const json tj = t ? json::parse(t, nullptr, false) : json();
    if (tj.is_object() && tj.contains("seconds") && tj["seconds"].is_array()) {
      seconds = tj["seconds"].get<std::vector<double>>();
    }
  }

  struct Group {
    std::string hand, object;
    std::vector<GraspPose> poses;
    std::vector<StabilityReport> reports;
    double seconds = 0.0;
    int timed = 0;
  };
  std::vector<Group> groups;
  std::vector<json> lines;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    auto g = std::find_if(groups.begin(), groups.end(),
                          [&](const Group& x) { return x.hand == r.hand && x.object == r.object; });
    if (g == groups.end()) g = groups.insert(groups.end(), Group{r.hand, r.object, {}, {}, 0.0, 0});
    g->poses.push_back(r.result.best_pose);
    g->reports.push_back(reports[i]);
    const auto idx = static_cast<std::size_t>(r.index);
    if (idx < seconds.size()) {
      g->seconds += seconds[idx];
      ++g->timed;
    }
    lines.push_back({{"type", "eval"},
                     {"index", r.index},
                     {"hand", r.hand},
                     {"object", r.object},
                     {"report", to_json(reports[i])},
                     {"refined_pose", to_json(refined[i])}});
  }
  if (csv.empty()) csv = fs::path(c.out).replace_extension(".csv").string();
  std::ofstream table(csv);
  if (!table) throw std::runtime_error("cannot write " + csv);
  table << "hand,object,success_rate,diversity_rad,mean_seconds\n";
  for (const auto& g : groups) {
    int passed = 0;
    for (const auto& r : g.reports) passed += r.passed;
    const double rate = static_cast<double>(passed) / static_cast<double>(g.reports.size());
    const DiversityStats d = diversity(g.poses, g.reports);
    lines.push_back({{"type", "summary"},
                     {"hand", g.hand},
                     {"object", g.object},
                     {"total", g.reports.size()},
                     {"passed", passed},
                     {"success_rate", rate},
                     {"diversity", to_json(d)}});
    char row[512];
    std::snprintf(row, sizeof row, "%s,%s,%.6f,%.6f,", g.hand.c_str(), g.object.c_str(), rate, d.mean_std);
    table << row;
    if (g.timed > 0) table << g.seconds / g.timed;
    table << '\n';
    std::printf("%s on %s: %d/%zu passed, diversity %.4f rad\n", g.hand.c_str(), g.object.c_str(), passed,
                g.reports.size(), d.mean_std);
  }
  const json echo = {{"eval", to_json(cfg.eval)}, {"object_samples", samples}, {"skipped", skipped},
                     {"source", data.header}};
  write_jsonl(c.out, make_header("eval", cfg.seed, echo), lines);
  return 0;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON pipeline config");
  cmd->add_option("--seed", c.seed, "Run seed (overrides the config)");
  cmd->add_option("--jobs", c.jobs, "Worker threads (0 = all cores)");
  cmd->add_option("--out", c.out, "Output JSON-lines file");
  cmd->add_flag("--dry-run", c.dry_run, "Validate inputs and write nothing");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-map grasp synthesis and cross-hand transfer"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> v_hands, v_objects;
  auto* validate = app.add_subcommand("validate", "Load and check assets");
  validate->add_option("--config", common.config_path, "JSON pipeline config");
  validate->add_option("--hand", v_hands, "Hand name or path");
  validate->add_option("--object", v_objects, "Object name or path");

  std::string hand, object;
  std::optional<int> batch, steps;
  auto* synth = app.add_subcommand("synth", "Synthesize grasps with annealed MALA");
  add_common(synth, common);
  synth->add_option("--hand", hand, "Hand name or path")->required();
  synth->add_option("--object", object, "Object name or path")->required();
  synth->add_option("--batch", batch, "Chains (overrides the config)");
  synth->add_option("--steps", steps, "Steps per chain (overrides the config)");

  std::string dataset, metric;
  int limit = -1;
  auto* transfer = app.add_subcommand("transfer", "Transfer dataset contact maps to a target hand");
  add_common(transfer, common);
  transfer->add_option("--dataset", dataset, "Synth JSON-lines file")->required();
  transfer->add_option("--hand", hand, "Target hand name or path")->required();
  transfer->add_option("--metric", metric, "aligned or euclidean (overrides the config)")
      ->check(CLI::IsMember({"aligned", "euclidean"}));
  transfer->add_option("--limit", limit, "Transfer at most this many records");

  std::string results, csv;
  auto* eval = app.add_subcommand("eval", "Stability-test transferred grasps");
  add_common(eval, common);
  eval->add_option("--results", results, "Transfer JSON-lines file")->required();
  eval->add_option("--csv", csv, "Aggregate CSV (default: --out with .csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*validate) return cmd_validate(common, v_hands, v_objects);
    if (*synth) return cmd_synth(common, hand, object, batch, steps);
    if (*transfer) return cmd_transfer(common, dataset, hand, metric, limit);
    if (*eval) return cmd_eval(common, results, csv);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const AssetError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeFailure;
  }
  return kUsageError;
}
