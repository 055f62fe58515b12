// Acceptance suite: one PASS/FAIL line per criterion. Long-running (about
// an hour on one core); run through scripts/run_acceptance.sh.

#include "../gradient_check.hpp"
#include "../oracles.hpp"

#include "dexmap/enclosing_sphere.hpp"
#include "dexmap/records.hpp"

#include <CLI11.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using namespace dexmap;

namespace {

const fs::path kAssets = DEXMAP_ASSET_DIR;
const std::string kCli = DEXMAP_CLI_PATH;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int g_failures = 0;

void verdict(int id, const char* name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
}

void note(const std::string& s) {
  std::printf("      %s\n", s.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

HandModel hand_asset(const std::string& name) { return load_hand_model(kAssets / "hands" / (name + ".json")); }
ObjectModel object_asset(const std::string& name, std::size_t samples = kDefaultObjectSamples) {
  return load_object(kAssets / "objects" / (name + ".obj"), samples);
}

// ---------------------------------------------------------------------------
// 1. Analytic gradients against central differences.

void criterion_gradients() {
  const auto t0 = Clock::now();
  const ObjectModel box = object_asset("box", 384);
  const char* hands[] = {"gripper2", "barrett3", "robotiq3", "allegro4", "shadow5"};
  const gradcheck::Term terms[] = {gradcheck::Term::dfc, gradcheck::Term::penetration, gradcheck::Term::prior,
                                   gradcheck::Term::contact};
  constexpr int kPerHand = 20;
  bool pass = true;
  std::string detail;
  for (const auto term : terms) {
    const auto t_term = Clock::now();
    double worst = 0.0, recheck = 0.0;
    int accepted = 0, kinked = 0, over = 0;
    for (const char* name : hands) {
      const HandModel hand = hand_asset(name);
      Rng rng = make_rng(1, stream_id(name), static_cast<std::uint64_t>(term));
      const ContactMap goal = sharpen_map(contact_map(
          box, hand_surface(hand, gradcheck::random_pose(hand, box, rng, 0.2, 0.0)), DistanceMetric::aligned, 1.0, 100.0));
      // Penetration and prior are shared by both modes; the synthesis form
      // skips the contact map.
      const bool synthesis_form = term != gradcheck::Term::contact;
      const GraspEnergy energy = synthesis_form
                                     ? GraspEnergy(hand, box, gradcheck::isolate(term))
                                     : GraspEnergy(hand, box, goal, gradcheck::isolate(term),
                                                   DistanceMetric::aligned, 1.0, 100.0);
      int got = 0;
      for (int attempt = 0; attempt < 400 && got < kPerHand; ++attempt) {
        const double inset = term == gradcheck::Term::penetration ? 0.5 : 0.15;
        const double slack = term == gradcheck::Term::prior ? 0.4 : 0.0;
        GraspState s{gradcheck::random_pose(hand, box, rng, inset, slack), {}};
        if (synthesis_form) s.regions = gradcheck::random_regions(hand, rng);
        const gradcheck::Check c = gradcheck::check(energy, s, term, 1e-5);
        if (!c.smooth) {
          ++kinked;
          continue;
        }
        if (c.energy == 0.0) continue;
        ++got;
        worst = std::max(worst, c.max_rel);
        if (c.max_rel >= 1e-3) {
          // Diagnostic only: a smaller step separates truncation error from a wrong gradient.
          ++over;
          recheck = std::max(recheck, gradcheck::check(energy, s, term, 1e-7).max_rel);
        }
      }
      accepted += got;
      if (got < kPerHand) pass = false;
    }
    if (!(worst < 1e-3)) pass = false;
    detail += fmt("%s %d cfgs max rel %.1e (%d kinked draws skipped, %.0f s); ", gradcheck::term_name(term),
                  accepted, worst, kinked, since(t_term));
    if (over) note(fmt("%s: %d cfgs at or above 1e-3 with h 1e-5; same cfgs with h 1e-7: max rel %.1e",
                       gradcheck::term_name(term), over, recheck));
  }
  const double secs = since(t0);
  if (!(secs < 120.0)) pass = false;
  verdict(1, "gradients", pass, detail + fmt("%.1f s (limit 120 s)", secs));
}

// ---------------------------------------------------------------------------
// 2. Thin plate: aligned vs Euclidean maps with a gripper on the top face.

void criterion_thin_shell() {
  const ObjectModel plate = object_asset("plate");
  const HandModel hand = hand_asset("gripper2");
  // Fingers pointing down, fingertips 0.5 mm above the top face.
  GraspPose p;
  p.joints = VecX::Zero(static_cast<Eigen::Index>(hand.dof()));
  p.rotation = Vec3(std::numbers::pi, 0.0, 0.0);
  const double top = 0.001;
  p.translation = Vec3(0, 0, top + 5e-4 - hand_surface(hand, p).points.row(2).minCoeff());
  const HandSurface hs = hand_surface(hand, p);
  const ContactMap a = contact_map(plate, hs, DistanceMetric::aligned, 1.0, 100.0);
  const ContactMap e = contact_map(plate, hs, DistanceMetric::euclidean, 1.0, 100.0);
  double ab = 0, eb = 0, at = 0, et = 0, contact_diff = 0;
  int nb = 0, nt = 0, nc = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double nz = plate.surface_points()[i].normal.z();
    if (nz < -0.9) {
      ab += a.values[i];
      eb += e.values[i];
      ++nb;
    } else if (nz > 0.9) {
      at += a.values[i];
      et += e.values[i];
      ++nt;
      if (e.values[i] >= 0.5) {
        contact_diff += std::abs(a.values[i] - e.values[i]);
        ++nc;
      }
    }
  }
  ab /= nb;
  eb /= nb;
  at /= nt;
  et /= nt;
  const bool bottom_ok = eb - ab >= 0.05;
  const bool top_ok = std::abs(at - et) <= 0.02;
  verdict(2, "thin shell", bottom_ok && top_ok,
          fmt("bottom mean aligned %.4f euclidean %.4f (margin %.4f, need >= 0.05: %s); top mean aligned %.4f "
              "euclidean %.4f (|diff| %.4f, need <= 0.02: %s)",
              ab, eb, eb - ab, bottom_ok ? "ok" : "no", at, et, std::abs(at - et), top_ok ? "ok" : "no"));
  note(fmt("top-face samples with euclidean value >= 0.5: %d, mean |aligned - euclidean| %.4f", nc,
           nc ? contact_diff / nc : 0.0));
}

// ---------------------------------------------------------------------------
// 3. Force-closure synthesis.

struct SynthRun {
  std::vector<GraspRecord> records;
  double seconds = 0.0;
};

std::map<std::string, SynthRun> g_synth;  // "hand/object"

MalaConfig synth_config() {
  MalaConfig cfg;
  cfg.batch = 64;
  cfg.steps = 2000;
  cfg.seed = 7;
  cfg.jobs = 0;
  return cfg;
}

const SynthRun& synth(const std::string& hand_name, const std::string& obj_name, const fs::path& out) {
  const std::string key = hand_name + "/" + obj_name;
  auto it = g_synth.find(key);
  if (it != g_synth.end()) return it->second;
  const HandModel hand = hand_asset(hand_name);
  const ObjectModel obj = object_asset(obj_name);
  const MalaConfig cfg = synth_config();
  SynthesisSummary summary;
  SynthRun run;
  run.records = synthesize_grasps(hand, obj, cfg, &summary);
  run.seconds = summary.seconds;
  std::vector<nlohmann::json> lines;
  for (const auto& r : run.records) lines.push_back(to_json(r));
  write_jsonl(out / ("synth_" + hand_name + "_" + obj_name + ".jsonl"),
              make_header("synth", cfg.seed, {{"synth", to_json(cfg)}}), lines);
  return g_synth.emplace(key, std::move(run)).first->second;
}

void criterion_synthesis(const fs::path& out) {
  bool pass = true;
  std::string detail;
  for (const char* h : {"gripper2", "allegro4"}) {
    for (const char* o : {"sphere", "box"}) {
      const SynthRun& r = synth(h, o, out);
      int gated = 0;
      for (const auto& g : r.records) gated += g.contact_distance <= 5e-3;
      const int n = static_cast<int>(r.records.size());
      if (n < 10 || !(r.seconds < 600.0)) pass = false;
      detail += fmt("%s/%s %d valid (%d with contacts within 5 mm) %.0f s; ", h, o, n, gated, r.seconds);
    }
  }
  verdict(3, "synthesis", pass, detail + "need >= 10 valid and < 600 s per pair, batch 64 x 2000 steps, seed 7");
}

// ---------------------------------------------------------------------------
// 4-7. Cross-hand transfer, metric ablation, diversity, speed.

struct Outcome {
  std::string hand, object;
  DistanceMetric metric;
  GraspPose pose;
  StabilityReport report;
  double seconds;
};

void criteria_transfer(const fs::path& out, int maps_per_object) {
  const char* targets[] = {"allegro4", "shadow5"};
  const char* objects[] = {"sphere", "box"};
  const HandModel source = hand_asset("gripper2");
  std::map<std::string, ObjectModel> objs;
  std::vector<std::pair<std::string, GraspRecord>> sources;
  for (const char* o : objects) {
    objs.emplace(o, object_asset(o));
    int taken = 0;
    for (const auto& r : synth("gripper2", o, out).records) {
      if (taken == maps_per_object) break;
      if (r.contact_distance > 5e-3) continue;
      sources.emplace_back(o, r);
      ++taken;
    }
  }
  note(fmt("%zu source maps (first %d per object from gripper2 records with contacts within 5 mm)",
           sources.size(), maps_per_object));

  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Outcome> outcomes;
  std::vector<nlohmann::json> lines;
  const StabilityConfig scfg;
  for (const char* t : targets) {
    const HandModel hand = hand_asset(t);
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const auto& [oname, rec] = sources[i];
      const ObjectModel& obj = objs.at(oname);
      for (const DistanceMetric m : {DistanceMetric::aligned, DistanceMetric::euclidean}) {
        TransferConfig cfg;
        cfg.metric = m;
        cfg.jobs = 0;
        Rng seeder = make_rng(7, stream_id("acceptance.transfer"), i);
        cfg.seed = seeder();
        const ContactMap goal = contact_map(obj, hand_surface(source, rec.pose), m, 1.0, 100.0);
        const TransferResult res = optimize_to_map(hand, obj, goal, cfg);
        const StabilityReport rep = evaluate_grasp(hand, obj, res.best_pose, scfg);
        outcomes.push_back({t, oname, m, res.best_pose, rep, res.seconds});
        TransferRecord tr{static_cast<int>(i), "gripper2", rec.chain, t, oname, m, cfg.seed, res};
        nlohmann::json j = to_json(tr);
        j["report"] = to_json(rep);
        lines.push_back(j);
        note(fmt("%s %s map %zu %s: E_c %.4f, %s (%d contacts, pen %.1f mm), %.1f s", t, oname.c_str(), i,
                 to_string(m).c_str(), res.best_energy.e_contact, rep.passed ? "passes" : "fails", rep.contact_count,
                 rep.max_penetration * 1e3, res.seconds));
      }
    }
  }
  write_jsonl(out / "transfers.jsonl", make_header("acceptance-transfer", 7, nlohmann::json::object()), lines);

  auto rate = [&](const std::string& hand, DistanceMetric m, int* passed, int* total) {
    *passed = *total = 0;
    for (const auto& o : outcomes) {
      if ((hand.empty() || o.hand == hand) && o.metric == m) {
        ++*total;
        *passed += o.report.passed;
      }
    }
    return *total ? static_cast<double>(*passed) / *total : 0.0;
  };

  // 4.
  bool pass4 = !sources.empty();
  std::string d4;
  for (const char* t : targets) {
    int p = 0, n = 0;
    const double r = rate(t, DistanceMetric::aligned, &p, &n);
    if (!(r >= 0.5)) pass4 = false;
    d4 += fmt("%s %d/%d = %.2f; ", t, p, n, r);
  }
  verdict(4, "cross-hand transfer", pass4, d4 + "need >= 0.50 per target hand, 32 restarts x 600 steps, mu 1");

  // 5.
  int pa = 0, na = 0, pe = 0, ne = 0;
  const double ra = rate("", DistanceMetric::aligned, &pa, &na);
  const double re = rate("", DistanceMetric::euclidean, &pe, &ne);
  std::string d5 = fmt("aligned %d/%d = %.2f, euclidean %d/%d = %.2f (need euclidean < aligned); ", pa, na, ra, pe, ne, re);
  for (const char* t : targets) {
    int p1, n1, p2, n2;
    rate(t, DistanceMetric::aligned, &p1, &n1);
    rate(t, DistanceMetric::euclidean, &p2, &n2);
    d5 += fmt("%s %d vs %d; ", t, p1, p2);
  }
  verdict(5, "ablation", na > 0 && re < ra, d5);

  // 6.
  bool pass6 = true;
  std::string d6;
  for (const char* t : targets) {
    std::vector<GraspPose> poses;
    std::vector<StabilityReport> reps;
    for (const auto& o : outcomes) {
      if (o.hand == t && o.metric == DistanceMetric::aligned) {
        poses.push_back(o.pose);
        reps.push_back(o.report);
      }
    }
    const DiversityStats d = diversity(poses, reps);
    const double mx = d.per_joint_std.size() ? d.per_joint_std.maxCoeff() : 0.0;
    if (!(mx > 0.1)) pass6 = false;
    d6 += fmt("%s over %d passing: max joint std %.3f rad, mean %.3f; ", t, d.sample_count, mx, d.mean_std);
  }
  verdict(6, "diversity", pass6, d6 + "need max joint std > 0.1 rad per target hand");

  // 7. Restarts are independent; on fewer than 8 cores the 8-core time is
  // projected from the measured time by the ratio of restart rounds.
  double worst = 0.0;
  std::string d7;
  for (const char* t : targets) {
    double sum = 0.0;
    int n = 0;
    for (const auto& o : outcomes) {
      if (o.hand == t) {
        sum += o.seconds;
        ++n;
      }
    }
    const double mean = n ? sum / n : 0.0;
    worst = std::max(worst, mean);
    d7 += fmt("%s mean %.1f s; ", t, mean);
  }
  const unsigned used = std::min(cores, 8u);
  const double rounds_used = std::ceil(32.0 / used), rounds_8 = 4.0;
  const double at8 = worst * rounds_8 / rounds_used;
  verdict(7, "speed", !outcomes.empty() && at8 <= 60.0,
          d7 + fmt("measured on %u core(s); %s 8-core time %.1f s (need <= 60 s)", used,
                   used >= 8 ? "measured" : "projected", at8));
}

// ---------------------------------------------------------------------------
// 8. Pipeline determinism through the CLI.

int run(const std::string& args, const fs::path& log) {
  const int status = std::system(("\"" + kCli + "\" " + args + " >> \"" + log.string() + "\" 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion_determinism(const fs::path& out) {
  const std::string cfg = "--config \"" + (kAssets / "configs" / "smoke.json").string() + "\"";
  std::vector<std::string> codes;
  for (const char* tag : {"a", "b"}) {
    const fs::path d = out / (std::string("pipeline_") + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    const std::string jobs = std::string(tag) == "a" ? " --jobs 1" : " --jobs 3";
    const std::string s = d.string();
    const fs::path log = d / "cli.log";
    std::string c;
    c += std::to_string(run("synth " + cfg + jobs + " --seed 11 --hand gripper2 --object box --out " + s + "/data.jsonl", log));
    c += std::to_string(run("transfer " + cfg + jobs + " --seed 11 --dataset " + s +
                            "/data.jsonl --hand allegro4 --limit 2 --out " + s + "/res.jsonl", log));
    c += std::to_string(run("eval " + cfg + jobs + " --seed 11 --results " + s + "/res.jsonl --out " + s + "/eval.jsonl", log));
    codes.push_back(c);
  }
  bool same = codes[0] == "000" && codes[1] == "000";
  std::string detail = "exit codes " + codes[0] + "/" + codes[1] + "; ";
  for (const char* f : {"data.jsonl", "res.jsonl", "eval.jsonl"}) {
    const std::string a = slurp(out / "pipeline_a" / f), b = slurp(out / "pipeline_b" / f);
    const auto lines = std::count(a.begin(), a.end(), '\n');
    const bool eq = !a.empty() && a == b;
    same = same && eq && lines > 1;
    detail += fmt("%s %s (%ld lines); ", f, eq ? "identical" : "DIFFERENT", static_cast<long>(lines));
  }
  verdict(8, "determinism", same, detail + "jobs 1 vs 3, seed 11");
}

// ---------------------------------------------------------------------------
// 9. Oracle equivalence.

ContactSet contacts(std::initializer_list<Vec3> dirs, double radius = 0.05) {
  ContactSet c;
  for (const Vec3& d : dirs) {
    c.points.push_back(radius * d.normalized());
    c.normals.push_back(d.normalized());
  }
  return c;
}

struct LpCase {
  ContactSet set;
  double mu;
  double mass;
};

void criterion_oracles() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Signed distance.
  double sdf_worst = 0.0;
  int queries = 0;
  for (const char* name : {"sphere", "box", "plate", "cylinder", "mug", "torus"}) {
    const ObjectModel obj = object_asset(name, 64);
    Eigen::AlignedBox3d b;
    for (const Vec3& v : obj.mesh().vertices) b.extend(v);
    const Vec3 lo = b.min() - Vec3::Constant(0.03), hi = b.max() + Vec3::Constant(0.03);
    const int n = queries + 167 > 1000 ? 1000 - queries : 167;
    for (int i = 0; i < n; ++i) {
      const Vec3 x = lo + (hi - lo).cwiseProduct(Vec3(u(rng), u(rng), u(rng)));
      sdf_worst = std::max(sdf_worst, std::abs(obj.signed_distance(x) - oracle::signed_distance(obj.mesh(), x)));
    }
    queries += n;
  }

  // Minimum enclosing sphere.
  double mes_worst = 0.0;
  const int clouds = 10;
  for (int c = 0; c < clouds; ++c) {
    std::vector<Vec3> pts;
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      Vec3 p(g(rng), g(rng), g(rng));
      if (c % 2) p = 0.07 * p.normalized();  // co-spherical cloud
      else p = Vec3(0.05 * p.x(), 0.02 * p.y(), 0.01 * p.z());
      pts.push_back(p + Vec3(0.3, -0.1, 0.2));
    }
    const Sphere s = min_enclosing_sphere(std::span<const Vec3>(pts));
    mes_worst = std::max(mes_worst, std::abs(s.radius - oracle::brute_force_enclosing_radius(pts)));
  }

  // LP resistance vs the coarse force grid. Disturbances of 0.5 N and 2 N
  // keep the grid spacing well below the forces involved. Cases are built
  // with clear margins: hand-picked layouts plus random ones whose verdicts do not
  // change when the disturbance is scaled by 0.5 or 2.
  std::vector<LpCase> cases = {
      {contacts({}), 1.0, 1.0},
      {contacts({Vec3(1, 0, 0)}), 1.0, 1.0},
      {contacts({Vec3(0, 0, -1)}), 1.0, 1.0},
      {contacts({Vec3(1, 0, 0), Vec3(-1, 0, 0)}), 1.0, 1.0},
      {contacts({Vec3(1, 0, 0), Vec3(-1, 0, 0)}), 0.2, 4.0},
      {contacts({Vec3(1, 0.3, 0), Vec3(1, -0.3, 0)}), 1.0, 1.0},
      {contacts({Vec3(1, 0, 0), Vec3(-0.5, 0.866, 0), Vec3(-0.5, -0.866, 0)}), 0.5, 1.0},
      {contacts({Vec3(1, 0, 0), Vec3(-0.5, 0.866, 0), Vec3(-0.5, -0.866, 0)}), 0.1, 4.0},
      {contacts({Vec3(0.5, 0, -1), Vec3(-0.25, 0.43, -1), Vec3(-0.25, -0.43, -1)}), 0.8, 1.0},
  };
  const StabilityConfig base;
  auto verdicts = [&](const LpCase& c, double scale) {
    std::array<bool, 6> v{};
    const auto ext = disturbance_wrenches(c.mass * scale, base.acceleration);
    for (int d = 0; d < 6; ++d) {
      v[d] = resists(c.set, c.mu, base.cone_edges, Vec3::Zero(), ext[d]) == LpStatus::feasible;
    }
    return v;
  };
  while (cases.size() < 20) {
    LpCase c;
    std::normal_distribution<double> g(0.0, 1.0);
    const int n = 1 + static_cast<int>(u(rng) * 3.0);
    std::vector<Vec3> dirs;
    for (int i = 0; i < n; ++i) dirs.emplace_back(g(rng), g(rng), g(rng));
    c.set = contacts({});
    for (const Vec3& d : dirs) {
      c.set.points.push_back(0.05 * d.normalized());
      c.set.normals.push_back(d.normalized());
    }
    c.mu = 0.3 + u(rng);
    c.mass = u(rng) < 0.5 ? 1.0 : 4.0;
    const auto v = verdicts(c, 1.0);
    if (verdicts(c, 0.5) != v || verdicts(c, 2.0) != v) continue;
    cases.push_back(c);
  }
  constexpr double kGridTolerance = 0.03;  // relative to the disturbance magnitude
  int agree = 0, total = 0, nnls_agree = 0, feasible = 0;
  double max_feasible_res = 0.0, min_infeasible_res = std::numeric_limits<double>::infinity();
  for (const auto& c : cases) {
    const auto v = verdicts(c, 1.0);
    const auto ext = disturbance_wrenches(c.mass, base.acceleration);
    std::vector<Eigen::Matrix<double, 6, Eigen::Dynamic>> cones;
    const Eigen::MatrixXd W = cone_wrench_generators(c.set, c.mu, base.cone_edges, Vec3::Zero());
    for (std::size_t i = 0; i < c.set.size(); ++i) cones.push_back(W.middleCols(static_cast<Eigen::Index>(i) * base.cone_edges, base.cone_edges));
    for (int d = 0; d < 6; ++d) {
      const double res = oracle::grid_equilibrium_residual(c.set.points, c.set.normals, c.mu, base.cone_edges,
                                                           Vec3::Zero(), ext[d]) /
                         ext[d].norm();
      const bool grid_ok = res <= kGridTolerance;
      agree += grid_ok == v[d];
      ++total;
      feasible += v[d];
      if (v[d]) max_feasible_res = std::max(max_feasible_res, res);
      else min_infeasible_res = std::min(min_infeasible_res, res);
      const double nres = c.set.size() ? oracle::capped_cone_residual(cones, -ext[d]) : ext[d].norm();
      nnls_agree += (nres < 1e-9) == v[d];
    }
  }

  const bool sdf_ok = sdf_worst < 1e-9, mes_ok = mes_worst <= 1e-9, lp_ok = agree == total;
  verdict(9, "oracles", sdf_ok && mes_ok && lp_ok,
          fmt("signed distance %d queries max |diff| %.1e m; enclosing sphere %d x 100-point clouds max |dr| %.1e m; "
              "LP vs force grid %d/%d verdicts agree over %zu contact sets (%d feasible)",
              queries, sdf_worst, clouds, mes_worst, agree, total, cases.size(), feasible));
  note(fmt("grid residual: max over feasible %.4f, min over infeasible %.4f, tolerance %.3f; NNLS agreement %d/%d",
           max_feasible_res, min_infeasible_res, kGridTolerance, nnls_agree, total));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string out = "acceptance_out";
  std::set<int> only;
  int maps = 4;
  app.add_option("--out-dir", out, "Directory for intermediate artifacts");
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
  app.add_option("--maps-per-object", maps, "Source maps per object for criteria 4-7");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(out);
  auto want = [&](int id) { return only.empty() || only.count(id) > 0; };

  const auto t0 = Clock::now();
  try {
    if (want(1)) criterion_gradients();
    if (want(2)) criterion_thin_shell();
    if (want(3)) criterion_synthesis(out);
    if (want(4) || want(5) || want(6) || want(7)) criteria_transfer(out, maps);
    if (want(8)) criterion_determinism(out);
    if (want(9)) criterion_oracles();
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d failing, %.0f s total\n", g_failures, since(t0));
  return g_failures == 0 ? 0 : 1;
}
