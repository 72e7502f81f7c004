// SPDX-License-Identifier: Apache-2.0
//
// Scenario playback: trajectory interpolation, the per-tick decision loop
// over the enabled strategies, and metric rows behind the experiment tables.

#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ckm/alignment.hpp"
#include "ckm/errors.hpp"

namespace ckm {

struct Waypoint {
  double t_s = 0.0;
  Point2 position;
  double orientation_deg = 0.0;
};

using Trajectory = std::vector<Waypoint>;

// Piecewise-linear pose at time t, clamped to the first/last waypoint.
// Orientation interpolates along the shortest arc.
inline Pose sample_trajectory(const Trajectory& traj, double t_s) {
  if (traj.empty()) {
    throw ValidationError("empty trajectory");
  }
  Pose p;
  p.timestamp_s = t_s;
  if (t_s <= traj.front().t_s) {
    p.position = traj.front().position;
    p.orientation_deg = normalize_deg(traj.front().orientation_deg);
    return p;
  }
  if (t_s >= traj.back().t_s) {
    p.position = traj.back().position;
    p.orientation_deg = normalize_deg(traj.back().orientation_deg);
    return p;
  }
  std::size_t hi = 1;
  while (traj[hi].t_s < t_s) {
    ++hi;
  }
  const Waypoint& a = traj[hi - 1];
  const Waypoint& b = traj[hi];
  const double u = (t_s - a.t_s) / (b.t_s - a.t_s);
  p.position = a.position + u * (b.position - a.position);
  p.orientation_deg =
      normalize_deg(a.orientation_deg + u * normalize_deg(b.orientation_deg - a.orientation_deg));
  return p;
}

enum class StrategyKind { kExhaustive, kLocation, kCkmStatic, kCkmDynamic };

inline const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::kExhaustive: return "exhaustive";
    case StrategyKind::kLocation: return "location";
    case StrategyKind::kCkmStatic: return "ckm-static";
    case StrategyKind::kCkmDynamic: return "ckm-dynamic";
  }
  return "?";
}

inline std::optional<StrategyKind> parse_strategy(std::string_view name) {
  if (name == "exhaustive") return StrategyKind::kExhaustive;
  if (name == "location") return StrategyKind::kLocation;
  if (name == "ckm-static") return StrategyKind::kCkmStatic;
  if (name == "ckm-dynamic") return StrategyKind::kCkmDynamic;
  return std::nullopt;
}

struct Scenario {
  std::string scene_path;
  std::string bim_path;      // empty when no map is needed
  std::string profile_path;  // empty -> default device profile
  std::vector<StrategyKind> strategies;
  Trajectory rx_trajectory;
  std::optional<Trajectory> obstacle_trajectory;
  SensorConfig sensors;
  DynamicConfig dynamic;
  double duration_s = 1.0;
  double decision_rate_hz = 10.0;
  std::uint64_t seed = 0;
  std::optional<Point2> d_o_normal;  // unit normal for signed d_o reporting
};

struct MetricsRow {
  double t_s = 0.0;
  std::string strategy;
  double rx_power_dbm = 0.0;
  BeamIndex tx_beam;
  BeamIndex rx_beam;
  LinkChoice link = LinkChoice::kNone;
  std::optional<double> d_o_m;
  std::optional<double> r;
  int commands_sent = 2;
  long sweeps_used = 0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline const char* link_choice_name(LinkChoice c) {
  switch (c) {
    case LinkChoice::kLoS: return "los";
    case LinkChoice::kNLoS: return "nlos";
    case LinkChoice::kNone: return "n/a";
  }
  return "?";
}

namespace detail {

inline constexpr std::uint64_t kRxSensorStream = 1;
inline constexpr std::uint64_t kTxSensorStream = 2;
inline constexpr std::uint64_t kObstacleSensorStream = 3;

inline void validate_trajectory(const Trajectory& traj, const Scene& scene, const char* what) {
  if (traj.empty()) {
    throw ValidationError(std::string(what) + ": empty trajectory");
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!is_finite(traj[i].position)) {
      throw ValidationError(std::string(what) + ": non-finite waypoint");
    }
    if (!scene.bounds.contains(traj[i].position)) {
      throw ValidationError(std::string(what) + ": waypoint outside scene bounds");
    }
    if (i > 0 && !(traj[i].t_s > traj[i - 1].t_s)) {
      throw ValidationError(std::string(what) + ": waypoint times must strictly increase");
    }
  }
}

}  // namespace detail

// Plays one episode: at each decision tick the ground truth advances along
// the trajectories, the sensors are sampled, every enabled strategy decides,
// and the achieved power of each decision is evaluated on the true channel.
// Deterministic for a fixed scenario and seed.
inline std::vector<MetricsRow> run_episode(const Scenario& sc, const Scene& scene,
                                           const Codebook& cb, const std::optional<Bim>& bim) {
  validate_scene(scene);
  validate_codebook(cb);
  validate_sensors(sc.sensors);
  if (sc.strategies.empty()) {
    throw ValidationError("no strategies enabled");
  }
  if (!(sc.duration_s > 0.0) || !(sc.decision_rate_hz > 0.0)) {
    throw ValidationError("duration and decision rate must be positive");
  }
  if (sc.decision_rate_hz > sc.sensors.uwb_rate_hz || sc.decision_rate_hz > sc.sensors.gyro_rate_hz) {
    throw ValidationError("decision rate above sensor rate");
  }
  detail::validate_trajectory(sc.rx_trajectory, scene, "rx trajectory");
  if (sc.obstacle_trajectory) {
    detail::validate_trajectory(*sc.obstacle_trajectory, scene, "obstacle trajectory");
  }
  bool wants_ckm = false;
  bool wants_dynamic = false;
  for (StrategyKind k : sc.strategies) {
    wants_ckm |= (k == StrategyKind::kCkmStatic || k == StrategyKind::kCkmDynamic);
    wants_dynamic |= (k == StrategyKind::kCkmDynamic);
  }
  if (wants_ckm) {
    if (!bim) {
      throw ValidationError("scenario needs a BIM but none is loaded");
    }
    if (bim->profile_hash != profile_hash(cb)) {
      throw ValidationError("BIM was built with a different device profile");
    }
  }
  if (wants_dynamic) {
    if (bim->construction.mode != BimMode::kDynamic) {
      throw ValidationError("ckm-dynamic needs a BIM built in dynamic mode");
    }
    if (!sc.obstacle_trajectory) {
      throw ValidationError("ckm-dynamic needs an obstacle trajectory");
    }
    if (!scene.obstacle) {
      throw ValidationError("ckm-dynamic needs an obstacle footprint in the scene");
    }
  }

  SensorConfig rx_sensors = sc.sensors;
  SensorConfig no_gyro = sc.sensors;
  no_gyro.gyro_sigma_deg = 0.0;  // fixed mounts and tags have no gyroscope

  const long n_ticks = std::lround(sc.duration_s * sc.decision_rate_hz);
  std::vector<MetricsRow> rows;
  rows.reserve(static_cast<std::size_t>(n_ticks) * sc.strategies.size());
  std::map<StrategyKind, StrategyDecision> previous;

  for (long k = 0; k < n_ticks; ++k) {
    const double t = static_cast<double>(k) / sc.decision_rate_hz;
    Pose rx_truth = sample_trajectory(sc.rx_trajectory, t);
    std::optional<Pose> obstacle_truth;
    if (sc.obstacle_trajectory) {
      obstacle_truth = sample_trajectory(*sc.obstacle_trajectory, t);
    }
    const Pose tx_truth{scene.tx.position, scene.tx.orientation_deg, t};

    const ObservedPose rx_obs = observe(rx_truth, rx_sensors, detail::kRxSensorStream);
    const ObservedPose tx_obs = observe(tx_truth, no_gyro, detail::kTxSensorStream);
    std::optional<ObservedPose> obstacle_obs;
    if (obstacle_truth) {
      obstacle_obs = observe(*obstacle_truth, no_gyro, detail::kObstacleSensorStream);
    }

    const ChannelPaths paths_true = resolve_paths(scene, rx_truth, obstacle_truth);

    // Obstacle-to-link geometry as the strategies see it (observed poses).
    std::optional<double> d_o_signed, ratio;
    if (obstacle_obs) {
      const double r = project_ratio(tx_obs.position, rx_obs.position, obstacle_obs->position);
      const Point2 tr = rx_obs.position - tx_obs.position;
      const Point2 v = (obstacle_obs->position - tx_obs.position) - r * tr;
      ratio = r;
      d_o_signed = sc.d_o_normal ? dot(v, *sc.d_o_normal) : norm(v);
    }

    for (StrategyKind kind : sc.strategies) {
      StrategyDecision dec;
      switch (kind) {
        case StrategyKind::kExhaustive: {
          MeasurementNoise noise;
          noise.sigma_db = scene.radio.noise_sigma_db;
          dec = exhaustive_strategy(scene, rx_truth, cb, mix_seed(sc.seed, 0xE1ull, static_cast<std::uint64_t>(k)),
                                    noise, obstacle_truth);
          break;
        }
        case StrategyKind::kLocation:
          dec = location_strategy(tx_obs, rx_obs, cb);
          break;
        case StrategyKind::kCkmStatic:
          dec = ckm_static_strategy(*bim, rx_obs, cb);
          break;
        case StrategyKind::kCkmDynamic:
          dec = ckm_dynamic_strategy(*bim, tx_obs, rx_obs, *obstacle_obs, sc.dynamic, cb);
          break;
      }
      auto prev = previous.find(kind);
      if (prev != previous.end()) {
        dec = change_filter(prev->second, dec);
      }
      previous[kind] = dec;

      const BeamVector f = beam_vector(cb, dec.tx_beam);
      const BeamVector w = beam_vector(cb, dec.rx_beam);
      const double power = std::max(pair_budget_dbm(scene, paths_true, f, w, cb.element_spacing),
                                    scene.radio.noise_floor_dbm);

      MetricsRow row;
      row.t_s = t;
      row.strategy = strategy_name(kind);
      row.rx_power_dbm = power;
      row.tx_beam = dec.tx_beam;
      row.rx_beam = dec.rx_beam;
      row.link = dec.link;
      row.d_o_m = d_o_signed;
      row.r = ratio;
      row.commands_sent = dec.commands_sent;
      row.sweeps_used = dec.sweeps_used;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// CSV with a fixed, documented column order. Optional fields print empty.
inline std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "t,strategy,rx_power_dbm,tx_beam,rx_beam,link_choice,d_o,r,commands_sent,sweeps_used\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    out += buf;
  };
  for (const MetricsRow& row : rows) {
    num(row.t_s);
    out += ',';
    out += row.strategy;
    out += ',';
    num(row.rx_power_dbm);
    std::snprintf(buf, sizeof(buf), ",%d,%d,", row.tx_beam.value, row.rx_beam.value);
    out += buf;
    out += link_choice_name(row.link);
    out += ',';
    if (row.d_o_m) num(*row.d_o_m);
    out += ',';
    if (row.r) num(*row.r);
    std::snprintf(buf, sizeof(buf), ",%d,%ld\n", row.commands_sent, row.sweeps_used);
    out += buf;
  }
  return out;
}

}  // namespace ckm
