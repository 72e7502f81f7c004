// SPDX-License-Identifier: Apache-2.0
//
// Site-specific multipath channel over 2D scene geometry: a line-of-sight
// path plus one single-bounce path per reflector (image method), with
// blockage by walls and a dynamic obstacle plate. Received power follows the
// read-three-take-max measurement protocol.

#pragma once

#include <algorithm>
#include <limits>
#include <optional>

#include "ckm/channel_paths.hpp"
#include "ckm/geometry.hpp"
#include "ckm/phased_array.hpp"
#include "ckm/rng.hpp"

namespace ckm {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Position + orientation of a device or obstacle at a point in time.
// Orientation is the array boresight bearing in degrees versus the +x axis.
struct Pose {
  Point2 position;
  double orientation_deg = 0.0;
  double timestamp_s = 0.0;
};

struct Wall {
  Segment2 seg;
  double attenuation_db = 40.0;  // per crossing
};

struct Reflector {
  Segment2 seg;
  double loss_db = 3.0;  // per bounce
};

// Footprint of the moving plate, a segment of length 2*half_length centered
// on the obstacle pose and aligned with its orientation. Treated as a
// non-reflecting occluder.
struct ObstacleSpec {
  double half_length_m = 0.25;
  double attenuation_db = std::numeric_limits<double>::infinity();
};

struct RadioConfig {
  double carrier_hz = 28.0e9;
  double tx_power_dbm = 10.0;
  double noise_floor_dbm = -90.0;
  double noise_sigma_db = 0.5;      // measurement noise per read, dB
  double blocking_cutoff_db = 100.0;  // crossings at/above this kill a path
};

struct Bounds {
  Point2 min;
  Point2 max;

  bool contains(Point2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

struct Scene {
  Bounds bounds{{0.0, 0.0}, {4.0, 4.0}};
  Pose tx;
  std::vector<Wall> walls;
  std::vector<Reflector> reflectors;
  std::optional<ObstacleSpec> obstacle;
  RadioConfig radio;

  double wavelength_m() const { return kSpeedOfLight / radio.carrier_hz; }
};

inline void validate_scene(const Scene& scene) {
  if (!(scene.bounds.min.x < scene.bounds.max.x) || !(scene.bounds.min.y < scene.bounds.max.y)) {
    throw std::invalid_argument("scene bounds are empty");
  }
  if (!scene.bounds.contains(scene.tx.position)) {
    throw std::invalid_argument("transmitter outside scene bounds");
  }
  for (const Wall& w : scene.walls) {
    if (w.seg.a == w.seg.b) {
      throw std::invalid_argument("degenerate wall segment");
    }
    if (!(w.attenuation_db >= 0.0)) {
      throw std::invalid_argument("wall attenuation must be >= 0 dB");
    }
  }
  for (const Reflector& r : scene.reflectors) {
    if (r.seg.a == r.seg.b) {
      throw std::invalid_argument("degenerate reflector segment");
    }
    if (!(r.loss_db >= 0.0)) {
      throw std::invalid_argument("reflection loss must be >= 0 dB");
    }
  }
  if (scene.obstacle && !(scene.obstacle->half_length_m > 0.0)) {
    throw std::invalid_argument("obstacle half length must be positive");
  }
  if (!(scene.radio.carrier_hz > 0.0)) {
    throw std::invalid_argument("carrier frequency must be positive");
  }
}

// World-frame footprint segment of the plate at the given pose.
inline Segment2 obstacle_footprint(const ObstacleSpec& spec, const Pose& pose) {
  const double c = std::cos(deg_to_rad(pose.orientation_deg));
  const double s = std::sin(deg_to_rad(pose.orientation_deg));
  const Point2 half{spec.half_length_m * c, spec.half_length_m * s};
  return Segment2{pose.position - half, pose.position + half};
}

namespace detail {

// Accumulated attenuation along one leg, or nullopt if any crossing blocks
// it outright. skip_reflector excludes the bouncing reflector from its own
// legs (they touch it at the bounce point by construction).
inline std::optional<double> trace_leg(const Scene& scene, const Segment2& leg,
                                       const std::optional<Segment2>& obstacle_seg,
                                       double obstacle_att_db, int skip_reflector) {
  double att = 0.0;
  for (const Wall& w : scene.walls) {
    if (segments_intersect(leg, w.seg)) {
      if (w.attenuation_db >= scene.radio.blocking_cutoff_db) {
        return std::nullopt;
      }
      att += w.attenuation_db;
    }
  }
  for (std::size_t k = 0; k < scene.reflectors.size(); ++k) {
    if (static_cast<int>(k) == skip_reflector) {
      continue;
    }
    // Metal plates occlude paths that are not bouncing off them.
    if (segments_intersect(leg, scene.reflectors[k].seg)) {
      return std::nullopt;
    }
  }
  if (obstacle_seg && segments_intersect(leg, *obstacle_seg)) {
    if (obstacle_att_db >= scene.radio.blocking_cutoff_db) {
      return std::nullopt;
    }
    att += obstacle_att_db;
  }
  return att;
}

inline std::complex<double> path_gain(const Scene& scene, double length_m, double loss_db) {
  const double lambda = scene.wavelength_m();
  const double mag = lambda / (4.0 * kPi * length_m) * std::pow(10.0, -loss_db / 20.0);
  const double phase = -2.0 * kPi * length_m / lambda;
  return std::polar(mag, phase);
}

}  // namespace detail

// Resolves LoS + first-order reflected paths from scene geometry. Paths whose
// departure or arrival direction falls behind an array plane (|angle| >= 90
// degrees off boresight) are dropped; the panel radiates into a half-plane.
inline ChannelPaths resolve_paths(const Scene& scene, const Pose& rx,
                                  const std::optional<Pose>& obstacle_pose = std::nullopt) {
  if (!scene.bounds.contains(rx.position)) {
    throw std::invalid_argument("receiver outside scene bounds");
  }
  if (rx.position == scene.tx.position) {
    throw std::invalid_argument("degenerate link");
  }

  std::optional<Segment2> obstacle_seg;
  double obstacle_att = std::numeric_limits<double>::infinity();
  if (obstacle_pose && scene.obstacle) {
    obstacle_seg = obstacle_footprint(*scene.obstacle, *obstacle_pose);
    obstacle_att = scene.obstacle->attenuation_db;
  }

  ChannelPaths out;
  const Point2 tx = scene.tx.position;

  auto push_path = [&](PathKind kind, int reflector_id, Point2 departure_target,
                       Point2 arrival_source, double length, double extra_loss_db,
                       std::optional<double> leg_att) {
    if (!leg_att) {
      return;
    }
    // departure_target is where the first leg aims (rx for LoS, the bounce
    // point for reflections); arrival_source is where the last leg comes
    // from (tx for LoS, the bounce point for reflections).
    const double aod = normalize_deg(link_angle_deg(tx, departure_target) - scene.tx.orientation_deg);
    const double aoa_bearing = link_angle_deg(rx.position, arrival_source);
    const double aoa = normalize_deg(aoa_bearing - rx.orientation_deg);
    if (std::abs(aod) >= 90.0 || std::abs(aoa) >= 90.0) {
      return;
    }
    PathComponent p;
    p.kind = kind;
    p.reflector_id = reflector_id;
    p.length_m = length;
    p.aod_deg = aod;
    p.aoa_deg = aoa;
    p.gain = detail::path_gain(scene, length, extra_loss_db + *leg_att);
    out.paths.push_back(p);
  };

  // Line of sight.
  {
    const Segment2 leg{tx, rx.position};
    const auto att = detail::trace_leg(scene, leg, obstacle_seg, obstacle_att, -1);
    push_path(PathKind::kLineOfSight, -1, rx.position, tx, distance(tx, rx.position), 0.0, att);
  }

  // One single-bounce path per reflector via the mirror image of the
  // transmitter. The bounce point must land on the reflector segment and
  // both legs must be clear.
  for (std::size_t k = 0; k < scene.reflectors.size(); ++k) {
    const Reflector& refl = scene.reflectors[k];
    const Point2 image = mirror_point(tx, refl.seg);
    if (image == tx) {
      continue;  // transmitter on the reflector plane
    }
    const auto bounce = segment_intersection(Segment2{image, rx.position}, refl.seg);
    if (!bounce || *bounce == rx.position || *bounce == tx) {
      continue;
    }
    const auto att1 =
        detail::trace_leg(scene, Segment2{tx, *bounce}, obstacle_seg, obstacle_att, static_cast<int>(k));
    if (!att1) {
      continue;
    }
    const auto att2 = detail::trace_leg(scene, Segment2{*bounce, rx.position}, obstacle_seg,
                                        obstacle_att, static_cast<int>(k));
    if (!att2) {
      continue;
    }
    const double length = distance(image, rx.position);  // image-method identity
    push_path(PathKind::kReflected, static_cast<int>(k), *bounce, *bounce, length, refl.loss_db,
              *att1 + *att2);
  }

  return out;
}

struct MeasurementNoise {
  double sigma_db = 0.5;
  int reads = 3;  // per-pair reads; the maximum is kept
};

struct Measurement {
  double rx_power_dbm = 0.0;
  BeamIndex tx_beam;
  BeamIndex rx_beam;
  double timestamp_s = 0.0;
};

// Deterministic part of the link budget for a beam pair, before noise and
// floor. -inf when no path couples.
inline double pair_budget_dbm(const Scene& scene, const ChannelPaths& paths, const BeamVector& f,
                              const BeamVector& w, double spacing_wl = 0.5) {
  const double g = pair_gain(f, w, paths, spacing_wl);
  return scene.radio.tx_power_dbm + 10.0 * std::log10(g);
}

namespace detail {

inline double protocol_power_dbm(double budget_dbm, const MeasurementNoise& noise,
                                 double floor_dbm, std::uint64_t seed) {
  double bump = 0.0;
  if (noise.sigma_db > 0.0 && noise.reads > 0) {
    SplitMix64 g(seed);
    bump = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < noise.reads; ++i) {
      bump = std::max(bump, noise.sigma_db * g.gaussian());
    }
  }
  return std::max(budget_dbm + bump, floor_dbm);
}

}  // namespace detail

// Measurement protocol on precomputed paths: budget of the pair, plus the
// maximum of `reads` i.i.d. Gaussian noise draws, floored at the noise floor.
// Fully determined by the seed.
inline Measurement measure_power_on_paths(const Scene& scene, const ChannelPaths& paths,
                                          BeamIndex tx_beam, BeamIndex rx_beam, const Codebook& cb,
                                          const MeasurementNoise& noise, std::uint64_t seed,
                                          double timestamp_s = 0.0) {
  const BeamVector f = beam_vector(cb, tx_beam);
  const BeamVector w = beam_vector(cb, rx_beam);
  const double gain = pair_gain(f, w, paths, cb.element_spacing);
  const double budget = scene.radio.tx_power_dbm + 10.0 * std::log10(gain);
  Measurement m;
  m.tx_beam = tx_beam;
  m.rx_beam = rx_beam;
  m.timestamp_s = timestamp_s;
  m.rx_power_dbm = detail::protocol_power_dbm(budget, noise, scene.radio.noise_floor_dbm, seed);
  return m;
}

inline Measurement measure_power(const Scene& scene, const Pose& rx, BeamIndex tx_beam,
                                 BeamIndex rx_beam, const Codebook& cb,
                                 const MeasurementNoise& noise, std::uint64_t seed,
                                 const std::optional<Pose>& obstacle_pose = std::nullopt) {
  const ChannelPaths paths = resolve_paths(scene, rx, obstacle_pose);
  return measure_power_on_paths(scene, paths, tx_beam, rx_beam, cb, noise, seed, rx.timestamp_s);
}

namespace detail {

// Runs the measurement protocol over every beam pair, hoisting the per-path
// beam couplings out of the pair loop. The arithmetic matches
// measure_power_on_paths term for term, so sweep results and one-off
// measurements are bit-identical. visit(tx, rx, power_dbm) is called in
// (tx ascending, rx ascending) order.
template <typename SeedFn, typename Visit>
void sweep_pairs(const Scene& scene, const ChannelPaths& paths, const Codebook& cb,
                 const MeasurementNoise& noise, SeedFn&& seed_of, Visit&& visit) {
  const int nb = cb.num_beams();
  std::vector<BeamVector> beams;
  beams.reserve(static_cast<std::size_t>(nb));
  for (int m = 1; m <= nb; ++m) {
    beams.push_back(beam_vector(cb, BeamIndex{m}));
  }
  const std::size_t np = paths.paths.size();
  // tx_c[p][m] = a_t(aod_p)^H f_m, rx_c[p][m] = w_m^H a_r(aoa_p)
  std::vector<std::vector<std::complex<double>>> tx_c(np), rx_c(np);
  for (std::size_t p = 0; p < np; ++p) {
    const BeamVector at = steering_vector(paths.paths[p].aod_deg, cb.num_elements, cb.element_spacing);
    const BeamVector ar = steering_vector(paths.paths[p].aoa_deg, cb.num_elements, cb.element_spacing);
    tx_c[p].reserve(static_cast<std::size_t>(nb));
    rx_c[p].reserve(static_cast<std::size_t>(nb));
    for (int m = 0; m < nb; ++m) {
      tx_c[p].push_back(cdot(at, beams[static_cast<std::size_t>(m)]));
      rx_c[p].push_back(cdot(beams[static_cast<std::size_t>(m)], ar));
    }
  }
  const double scale =
      static_cast<double>(cb.num_elements) * static_cast<double>(cb.num_elements);
  for (int t = 1; t <= nb; ++t) {
    for (int r = 1; r <= nb; ++r) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t p = 0; p < np; ++p) {
        acc += paths.paths[p].gain * rx_c[p][static_cast<std::size_t>(r - 1)] *
               tx_c[p][static_cast<std::size_t>(t - 1)];
      }
      const double budget = scene.radio.tx_power_dbm + 10.0 * std::log10(scale * std::norm(acc));
      const double power =
          protocol_power_dbm(budget, noise, scene.radio.noise_floor_dbm, seed_of(t, r));
      visit(BeamIndex{t}, BeamIndex{r}, power);
    }
  }
}

}  // namespace detail

}  // namespace ckm
