// SPDX-License-Identifier: Apache-2.0
//
// UWB positioning and gyroscope simulation: noisy, rate-limited observers of
// ground-truth poses. Observations are sample-and-hold on the sensor tick
// grid and fully determined by (seed, stream, tick).

#pragma once

#include <cstdint>

#include "ckm/channel.hpp"
#include "ckm/rng.hpp"

namespace ckm {

struct SensorConfig {
  double uwb_sigma_m = 0.0333;    // per axis; ~3 sigma matches the 10 cm accuracy figure
  double uwb_rate_hz = 200.0;
  double gyro_sigma_deg = 0.0667;  // ~3 sigma matches the 0.2 degree accuracy figure
  double gyro_rate_hz = 200.0;
  std::uint64_t seed = 0;
};

inline void validate_sensors(const SensorConfig& cfg) {
  if (!(cfg.uwb_rate_hz > 0.0) || !(cfg.gyro_rate_hz > 0.0)) {
    throw std::invalid_argument("sensor rates must be positive");
  }
  if (cfg.uwb_sigma_m < 0.0 || cfg.gyro_sigma_deg < 0.0) {
    throw std::invalid_argument("sensor sigmas must be >= 0");
  }
}

struct ObservedPose {
  Point2 position;
  double orientation_deg = 0.0;
  double timestamp_s = 0.0;  // aligned to the positioning tick grid
};

inline std::int64_t sensor_tick(double t_s, double rate_hz) {
  return static_cast<std::int64_t>(std::floor(t_s * rate_hz + 1e-9));
}

namespace detail {
inline constexpr std::uint64_t kUwbSalt = 0x55574221ull;
inline constexpr std::uint64_t kGyroSalt = 0x47595221ull;
}  // namespace detail

// Observation of a ground-truth pose through the positioning tag and the
// gyroscope. Noise depends only on (seed, stream_id, tick), so queries within
// one tick repeat and replays are exact regardless of call order.
inline ObservedPose observe(const Pose& truth, const SensorConfig& cfg, std::uint64_t stream_id) {
  const std::int64_t ptick = sensor_tick(truth.timestamp_s, cfg.uwb_rate_hz);
  const std::int64_t gtick = sensor_tick(truth.timestamp_s, cfg.gyro_rate_hz);
  SplitMix64 pos_rng(mix_seed(cfg.seed, stream_id, detail::kUwbSalt, static_cast<std::uint64_t>(ptick)));
  SplitMix64 gyro_rng(mix_seed(cfg.seed, stream_id, detail::kGyroSalt, static_cast<std::uint64_t>(gtick)));
  ObservedPose obs;
  obs.position.x = truth.position.x + cfg.uwb_sigma_m * pos_rng.gaussian();
  obs.position.y = truth.position.y + cfg.uwb_sigma_m * pos_rng.gaussian();
  obs.orientation_deg = normalize_deg(truth.orientation_deg + cfg.gyro_sigma_deg * gyro_rng.gaussian());
  obs.timestamp_s = static_cast<double>(ptick) / cfg.uwb_rate_hz;
  return obs;
}

}  // namespace ckm
