// SPDX-License-Identifier: Apache-2.0
//
// Online beam-alignment strategies behind a common decision type: exhaustive
// sweep (the training-heavy ceiling), location-based selection from observed
// poses, map lookup with orientation refinement, and the obstacle-aware
// variant that switches between the stored direct and reflected pairs. Plus
// the beam-change filter that suppresses redundant control commands.

#pragma once

#include <iostream>
#include <optional>

#include "ckm/bim.hpp"
#include "ckm/channel.hpp"
#include "ckm/sensors.hpp"

namespace ckm {

enum class LinkChoice { kLoS, kNLoS, kNone };

struct StrategyDecision {
  BeamIndex tx_beam;
  BeamIndex rx_beam;
  LinkChoice link = LinkChoice::kNone;
  int commands_sent = 2;   // both indices programmed unless filtered
  long sweeps_used = 0;    // online pair evaluations spent on this decision
};

struct DynamicConfig {
  double eta_m = 0.30;  // obstacle-to-link distance threshold
};

// Geometry-only selection from observed positions and orientation. The
// transmit beam aims along the link bearing in the transmit array frame; the
// receive beam aims at the reversed bearing in the receive array frame.
inline StrategyDecision location_strategy(const ObservedPose& tx_obs, const ObservedPose& rx_obs,
                                          const Codebook& cb) {
  const double phi = link_angle_deg(tx_obs.position, rx_obs.position);
  const double tx_target = normalize_deg(phi - tx_obs.orientation_deg);
  const double rx_target = normalize_deg(phi + 180.0 - rx_obs.orientation_deg);
  StrategyDecision d;
  d.tx_beam = nearest_beam(cb, tx_target);
  d.rx_beam = nearest_beam(cb, rx_target);
  return d;
}

// Map lookup: nearest grid cell gives the stored pair; the receive beam is
// refined by the rotation relative to the construction orientation.
inline StrategyDecision ckm_static_strategy(const Bim& bim, const ObservedPose& rx_obs,
                                            const Codebook& cb) {
  const int cell = locate_grid(bim, rx_obs.position);
  const double omega =
      normalize_deg(bim.construction.rx_orientation_deg - rx_obs.orientation_deg);
  StrategyDecision d;
  d.tx_beam = bim.record(cell).los_pair.tx;
  d.rx_beam = refine_rx_beam(bim, cb, cell, omega);
  return d;
}

// Obstacle-aware lookup: when the observed obstacle projects onto the link
// (0 < r < 1) within eta of it, switch to the stored reflected pair ahead of
// the outage; otherwise use the direct pair.
inline StrategyDecision ckm_dynamic_strategy(const Bim& bim, const ObservedPose& tx_obs,
                                             const ObservedPose& rx_obs,
                                             const ObservedPose& obstacle_obs,
                                             const DynamicConfig& cfg,
                                             [[maybe_unused]] const Codebook& cb) {
  const int cell = locate_grid(bim, rx_obs.position);
  const BimRecord& rec = bim.record(cell);
  const double r = project_ratio(tx_obs.position, rx_obs.position, obstacle_obs.position);
  const double d_o = perp_distance(tx_obs.position, rx_obs.position, obstacle_obs.position);
  const bool near_link = r > 0.0 && r < 1.0 && d_o <= cfg.eta_m;
  StrategyDecision d;
  if (near_link && rec.nlos_pair) {
    d.tx_beam = rec.nlos_pair->tx;
    d.rx_beam = rec.nlos_pair->rx;
    d.link = LinkChoice::kNLoS;
  } else {
    if (near_link && !rec.nlos_pair) {
      std::cerr << "ckm: cell " << cell << " has no reflected pair, staying on the direct pair\n";
    }
    d.tx_beam = rec.los_pair.tx;
    d.rx_beam = rec.los_pair.rx;
    d.link = LinkChoice::kLoS;
  }
  return d;
}

// Full sweep over every beam pair with the measurement protocol; the online
// oracle ceiling. Ties keep the lowest (tx, rx) pair.
inline StrategyDecision exhaustive_strategy(const Scene& scene, const Pose& rx_truth,
                                            const Codebook& cb, std::uint64_t seed,
                                            const MeasurementNoise& noise = MeasurementNoise{},
                                            const std::optional<Pose>& obstacle_pose = std::nullopt) {
  const ChannelPaths paths = resolve_paths(scene, rx_truth, obstacle_pose);
  bool set = false;
  double best_power = 0.0;
  StrategyDecision d;
  detail::sweep_pairs(
      scene, paths, cb, noise,
      [&](int t, int r) {
        return mix_seed(seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(r));
      },
      [&](BeamIndex t, BeamIndex r, double power) {
        if (!set || power > best_power) {
          set = true;
          best_power = power;
          d.tx_beam = t;
          d.rx_beam = r;
        }
      });
  d.sweeps_used = static_cast<long>(cb.num_beams()) * static_cast<long>(cb.num_beams());
  return d;
}

// Counts only the indices that changed since the previous decision; an
// unchanged index needs no control frame.
inline StrategyDecision change_filter(const StrategyDecision& prev, const StrategyDecision& next) {
  StrategyDecision out = next;
  out.commands_sent = static_cast<int>(prev.tx_beam != next.tx_beam) +
                      static_cast<int>(prev.rx_beam != next.rx_beam);
  return out;
}

}  // namespace ckm
