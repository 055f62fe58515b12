#include "dexmap/transfer.hpp"

#include "dexmap/parallel.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dexmap {

void TransferConfig::validate() const {
  if (restarts < 1) throw std::invalid_argument("transfer: restarts must be >= 1");
  if (steps < 0) throw std::invalid_argument("transfer: steps must be >= 0");
  if (!(adam_lr > 0.0)) throw std::invalid_argument("transfer: adam_lr must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw std::invalid_argument("transfer: adam betas must lie in [0, 1)");
  }
  if (checkpoint_every < 1) throw std::invalid_argument("transfer: checkpoint_every must be >= 1");
  if (!(distance_cutoff > 0.0)) throw std::invalid_argument("transfer: distance_cutoff must be > 0");
}

GraspPose init_pose(const HandModel& hand, const ObjectModel& obj, Rng& rng) {
  GraspPose p;
  p.joints = hand.mid_range();
  // Palm placement relative to the root at mid-range.
  const Transform palm0 = forward_kinematics(hand, p).links[hand.link_index(hand.palm_link())];
  const Mat3 R = rotation_from_axis_angle(random_rotation(rng));
  p.rotation = axis_angle_from_rotation(R);
  const Sphere& s = obj.enclosing_sphere();
  const Vec3 palm = s.center + R * (palm0.linear() * hand.palm_backward_direction()) * s.radius;
  p.translation = palm - R * palm0.translation();
  return p;
}

AdamRun adam_descent(const GraspEnergy& energy, GraspPose start, const TransferConfig& cfg) {
  AdamRun run;
  GraspState state{std::move(start), {}};
  VecX x = state.pose.flat();
  VecX m = VecX::Zero(x.size()), v = VecX::Zero(x.size()), g;
  GraspEnergy::Workspace ws;
  double b1t = 1.0, b2t = 1.0;
  for (int step = 0; step <= cfg.steps; ++step) {
    state.pose = GraspPose::from_flat(x);
    const bool last = step == cfg.steps;
    const EnergyBreakdown e = energy.evaluate(state, last ? nullptr : &g, &ws);
    if (!std::isfinite(e.total) || (!last && !g.allFinite())) {
      run.failed = true;
      run.pose = state.pose;
      run.energy = e;
      return run;
    }
    if (step % cfg.checkpoint_every == 0 || last) run.checkpoints.push_back(e.total);
    if (last) {
      run.energy = e;
      break;
    }
    b1t *= cfg.adam_beta1;
    b2t *= cfg.adam_beta2;
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
    v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g.cwiseAbs2();
    const VecX m_hat = m / (1.0 - b1t);
    const VecX v_hat = v / (1.0 - b2t);
    x.array() -= cfg.adam_lr * m_hat.array() / (v_hat.array().sqrt() + cfg.adam_eps);
  }
  run.pose = state.pose;
  return run;
}

TransferResult optimize_to_map(const HandModel& hand, const ObjectModel& obj, const ContactMap& goal,
                               const TransferConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const ContactMap sharp = sharpen_map(goal);
  const GraspEnergy energy(hand, obj, sharp, cfg.weights, cfg.metric, cfg.gamma, cfg.distance_scale,
                           cfg.distance_cutoff);

  const auto n = static_cast<std::size_t>(cfg.restarts);
  std::vector<AdamRun> runs(n);
  TransferResult res;
  res.initial_poses.resize(n);
  res.initial_energies.resize(n);
  parallel_for(n, cfg.jobs, [&](std::size_t r) {
    Rng rng = make_rng(cfg.seed, stream_id("transfer.init"), r);
    res.initial_poses[r] = init_pose(hand, obj, rng);
    try {
      runs[r] = adam_descent(energy, res.initial_poses[r], cfg);
    } catch (const std::invalid_argument&) {
      runs[r].failed = true;  // non-finite pose
    }
    res.initial_energies[r] = runs[r].checkpoints.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                          : runs[r].checkpoints.front();
  });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < n; ++r) {
    res.all_final_energies.push_back(runs[r].failed ? nan : runs[r].energy.total);
    if (!runs[r].failed && runs[r].energy.total < best) {
      best = runs[r].energy.total;
      res.best_restart = static_cast<int>(r);
    }
  }
  if (res.best_restart < 0) throw std::runtime_error("transfer: every restart failed");
  res.best_pose = runs[res.best_restart].pose;
  res.best_energy = runs[res.best_restart].energy;

  // Best-so-far over all restarts at each checkpoint.
  double so_far = std::numeric_limits<double>::infinity();
  for (int step = 0;; step = std::min(step + cfg.checkpoint_every, cfg.steps)) {
    const std::size_t k = static_cast<std::size_t>((step + cfg.checkpoint_every - 1) / cfg.checkpoint_every);
    for (const auto& run : runs) {
      if (!run.failed && k < run.checkpoints.size()) so_far = std::min(so_far, run.checkpoints[k]);
    }
    res.trajectory.push_back({step, so_far});
    if (step == cfg.steps) break;
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace dexmap
