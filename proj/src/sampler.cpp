#include "dexmap/sampler.hpp"

#include "dexmap/parallel.hpp"
#include "dexmap/transfer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace dexmap {

void MalaConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("mala: step_size must be > 0");
  if (steps <= 0) throw std::invalid_argument("mala: steps must be > 0");
  if (batch <= 0) throw std::invalid_argument("mala: batch must be > 0");
  if (!(temperature > 0.0 && temperature_end > 0.0)) {
    throw std::invalid_argument("mala: temperatures must be > 0");
  }
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("mala: noise_scale must be >= 0");
  if (!(switch_probability >= 0.0 && switch_probability <= 1.0)) {
    throw std::invalid_argument("mala: switch_probability must lie in [0, 1]");
  }
  if (!(translation_scale > 0.0 && rotation_scale > 0.0 && joint_scale > 0.0 && region_scale > 0.0)) {
    throw std::invalid_argument("mala: preconditioner scales must be > 0");
  }
}

double MalaConfig::temperature_at(int step) const {
  if (steps <= 1) return temperature;
  const double t = static_cast<double>(step) / static_cast<double>(steps - 1);
  return temperature * std::pow(temperature_end / temperature, t);
}

bool mala_step(MalaState& s, const EnergyFn& energy, const VecX& precond, double step_size,
               double temperature, double noise_scale, Rng& rng,
               const std::function<void(VecX&)>& project) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = std::sqrt(2.0 * step_size * temperature) * noise_scale;
  VecX xi(s.x.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
  VecX y = s.x - step_size * precond.cwiseProduct(s.gradient) + sigma * precond.cwiseSqrt().cwiseProduct(xi);
  if (project) project(y);

  VecX gy;
  const double ey = energy(y, &gy);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  if (!std::isfinite(ey) || !gy.allFinite()) return false;

  double log_ratio = (s.energy - ey) / temperature;
  if (sigma > 0.0) {
    // log q(x | y) - log q(y | x) for the Gaussian proposal.
    auto log_q = [&](const VecX& to, const VecX& from, const VecX& g_from) {
      const VecX d = to - from + step_size * precond.cwiseProduct(g_from);
      return -0.5 * d.cwiseAbs2().cwiseQuotient(precond).sum() / (sigma * sigma);
    };
    log_ratio += log_q(s.x, y, gy) - log_q(y, s.x, s.gradient);
  }
  if (log_ratio >= 0.0 || std::log(u) < log_ratio) {
    s.x = std::move(y);
    s.energy = ey;
    s.gradient = std::move(gy);
    return true;
  }
  return false;
}

namespace {

VecX preconditioner(const MalaConfig& cfg, std::size_t dof, std::size_t contacts) {
  VecX m(6 + dof + 2 * contacts);
  m.segment<3>(0).setConstant(cfg.translation_scale);
  m.segment<3>(3).setConstant(cfg.rotation_scale);
  m.segment(6, static_cast<Eigen::Index>(dof)).setConstant(cfg.joint_scale);
  m.tail(static_cast<Eigen::Index>(2 * contacts)).setConstant(cfg.region_scale);
  return m;
}

double max_contact_distance(const HandModel& hand, const ObjectModel& obj, const GraspRecord& rec) {
  double worst = 0.0;
  for (const Vec3& x : sample_contact_points(hand, rec.pose, rec.regions)) {
    worst = std::max(worst, std::abs(obj.signed_distance(x)));
  }
  return worst;
}

}  // namespace

void score_record(GraspRecord& rec, const HandModel& hand, const ObjectModel& obj, const MalaConfig& cfg) {
  const GraspEnergy energy(hand, obj, cfg.weights);
  rec.energy = energy.evaluate({rec.pose, rec.regions});
  rec.contact_distance = max_contact_distance(hand, obj, rec);
  rec.valid = rec.energy.dfc_norm <= cfg.dfc_max && rec.energy.e_pen <= cfg.pen_max &&
              rec.energy.e_prior <= cfg.prior_max && rec.contact_distance <= cfg.contact_distance_max;
}

GraspRecord run_chain(const HandModel& hand, const ObjectModel& obj, const MalaConfig& cfg, int chain,
                      ChainStats* stats) {
  cfg.validate();
  const auto contacts = static_cast<std::size_t>(hand.synthesis_contacts());
  if (contacts < 2) throw std::invalid_argument("hand '" + hand.name() + "' has fewer than 2 synthesis contacts");
  const std::size_t n_regions = hand.contact_regions().size();
  Rng rng = make_rng(cfg.seed, stream_id("synth.chain"), static_cast<std::uint64_t>(chain));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GraspState state;
  state.pose = init_pose(hand, obj, rng);
  std::vector<int> ids(n_regions);
  for (std::size_t i = 0; i < n_regions; ++i) ids[i] = static_cast<int>(i);
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t i = 0; i < contacts; ++i) state.regions.push_back({ids[i], unit(rng), unit(rng)});

  const GraspEnergy energy(hand, obj, cfg.weights);
  GraspState scratch = state;
  const EnergyFn fn = [&](const VecX& x, VecX* g) {
    scratch.set_flat(x);
    if (!scratch.pose.finite()) return std::numeric_limits<double>::infinity();
    return energy.evaluate(scratch, g).total;
  };
  const Eigen::Index nq = 6 + static_cast<Eigen::Index>(hand.dof());
  const auto clamp_regions = [nq](VecX& x) {
    x.tail(x.size() - nq) = x.tail(x.size() - nq).cwiseMax(0.0).cwiseMin(1.0);
  };
  const VecX base = preconditioner(cfg, hand.dof(), contacts);
  VecX precond = base;

  MalaState s;
  s.x = state.flat();
  s.energy = fn(s.x, &s.gradient);
  VecX rms = s.gradient.cwiseAbs2();
  double step_size = cfg.step_size;
  const double log_step0 = std::log(cfg.step_size);
  double log_step = log_step0;
  int accepted = 0, window = 0;
  for (int step = 0; step < cfg.steps; ++step) {
    if (stats && step % stats->trace_every == 0) {
      stats->energy.push_back(s.energy);
      stats->step_size.push_back(step_size);
      if (step > 0) stats->acceptance_window.push_back(static_cast<double>(window) / stats->trace_every);
      window = 0;
    }
    const double T = cfg.temperature_at(step);
    if (cfg.rms_decay > 0.0) {
      rms = cfg.rms_decay * rms + (1.0 - cfg.rms_decay) * s.gradient.cwiseAbs2();
      precond = base.cwiseQuotient((rms.cwiseSqrt().array() + cfg.rms_damping).matrix());
    }
    if (n_regions > contacts && unit(rng) < cfg.switch_probability) {
      // Re-draw one contact's region among the unused ones; symmetric proposal.
      state.set_flat(s.x);
      const std::size_t which = static_cast<std::size_t>(unit(rng) * static_cast<double>(contacts)) % contacts;
      std::vector<int> unused;
      for (std::size_t r = 0; r < n_regions; ++r) {
        bool used = false;
        for (const auto& a : state.regions) used = used || a.region == static_cast<int>(r);
        if (!used) unused.push_back(static_cast<int>(r));
      }
      GraspState cand = state;
      cand.regions[which] = {unused[static_cast<std::size_t>(unit(rng) * static_cast<double>(unused.size())) % unused.size()],
                             unit(rng), unit(rng)};
      VecX g;
      const double e = energy.evaluate(cand, &g).total;
      const double u = unit(rng);
      if (std::isfinite(e) && g.allFinite() && (e <= s.energy || std::log(u) < (s.energy - e) / T)) {
        state = cand;
        scratch.regions = cand.regions;
        s.x = cand.flat();
        s.energy = e;
        s.gradient = g;
      }
    }
    const bool ok = mala_step(s, fn, precond, step_size, T, cfg.noise_scale, rng, clamp_regions);
    if (ok) {
      ++accepted;
      ++window;
    }
    if (cfg.adapt_rate > 0.0) {
      log_step += cfg.adapt_rate * ((ok ? 1.0 : 0.0) - cfg.target_acceptance);
      log_step = std::clamp(log_step, log_step0 - 12.0, log_step0 + 4.0);
      step_size = std::exp(log_step);
    }
  }
  if (stats) stats->acceptance = static_cast<double>(accepted) / cfg.steps;

  state.set_flat(s.x);
  GraspRecord rec;
  rec.hand = hand.name();
  rec.object = obj.name();
  rec.pose = state.pose;
  rec.regions = state.regions;
  rec.seed = cfg.seed;
  rec.chain = chain;
  score_record(rec, hand, obj, cfg);
  return rec;
}

std::vector<GraspRecord> synthesize_grasps(const HandModel& hand, const ObjectModel& obj,
                                           const MalaConfig& cfg, SynthesisSummary* summary) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto n = static_cast<std::size_t>(cfg.batch);
  std::vector<GraspRecord> finals(n);
  std::vector<double> acc(n, 0.0);
  parallel_for(n, cfg.jobs, [&](std::size_t c) {
    ChainStats st;
    finals[c] = run_chain(hand, obj, cfg, static_cast<int>(c), &st);
    acc[c] = st.acceptance;
    if (finals[c].valid) {
      finals[c].contact_map = contact_map(obj, hand_surface(hand, finals[c].pose), DistanceMetric::aligned,
                                          cfg.map_gamma, cfg.map_distance_scale);
    }
  });
  std::vector<GraspRecord> out;
  double acc_sum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    acc_sum += acc[c];
    if (finals[c].valid) out.push_back(std::move(finals[c]));
  }
  if (summary) {
    summary->chains = cfg.batch;
    summary->valid = static_cast<int>(out.size());
    summary->acceptance_rate = acc_sum / static_cast<double>(n);
    summary->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return out;
}

}  // namespace dexmap
