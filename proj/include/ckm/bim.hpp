// SPDX-License-Identifier: Apache-2.0
//
// Beam index map (BIM): the channel-knowledge store. Offline construction by
// exhaustive beam sweeping over a location grid, nearest-grid lookup, and
// orientation-refined beam retrieval.

#pragma once

#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include "ckm/channel.hpp"
#include "ckm/phased_array.hpp"

namespace ckm {

// Row-major grid of square cells; ids run 1..nx*ny starting at the origin
// corner.
struct GridSpec {
  Point2 origin;
  double cell_m = 0.8;
  int nx = 1;
  int ny = 1;

  int num_cells() const { return nx * ny; }

  Point2 center(int grid_id) const {
    const int i = grid_id - 1;
    const int col = i % nx;
    const int row = i / nx;
    return {origin.x + (static_cast<double>(col) + 0.5) * cell_m,
            origin.y + (static_cast<double>(row) + 0.5) * cell_m};
  }
};

inline void validate_grid(const GridSpec& grid) {
  if (!(grid.cell_m > 0.0)) {
    throw std::invalid_argument("grid cell size must be positive");
  }
  if (grid.nx < 1 || grid.ny < 1) {
    throw std::invalid_argument("grid needs at least one cell");
  }
}

struct BeamPair {
  BeamIndex tx;
  BeamIndex rx;

  friend constexpr auto operator<=>(const BeamPair&, const BeamPair&) = default;
};

struct BimRecord {
  int grid_id = 1;
  Point2 center;
  BeamPair los_pair;
  double los_power_dbm = 0.0;
  std::optional<BeamPair> nlos_pair;
  std::optional<double> nlos_power_dbm;
};

enum class BimMode { kStatic, kDynamic };

struct BimConstruction {
  BimMode mode = BimMode::kStatic;
  std::uint64_t seed = 0;
  double rx_orientation_deg = 0.0;
  double noise_sigma_db = 0.0;
  double los_cone_deg = 15.0;
  std::uint64_t scene_hash = 0;
  std::uint64_t pair_evaluations = 0;
  std::string created;
};

struct Bim {
  GridSpec grid;
  Codebook profile;
  std::uint64_t profile_hash = 0;
  BimConstruction construction;
  std::vector<BimRecord> records;  // sorted by grid_id, one per cell

  const BimRecord& record(int grid_id) const {
    if (grid_id < 1 || grid_id > static_cast<int>(records.size())) {
      throw std::out_of_range("grid id outside BIM");
    }
    return records[static_cast<std::size_t>(grid_id - 1)];
  }
};

// Seed for the 3-read measurement of one beam pair during construction.
// Exposed so an independent re-evaluation can reproduce the same draws.
inline std::uint64_t construction_measurement_seed(std::uint64_t master_seed, int grid_id,
                                                   BeamIndex tx, BeamIndex rx) {
  return mix_seed(master_seed, static_cast<std::uint64_t>(grid_id),
                  static_cast<std::uint64_t>(tx.value), static_cast<std::uint64_t>(rx.value));
}

namespace detail {

inline std::string today_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday);
  return buf;
}

}  // namespace detail

// Offline construction: for every cell, place the receiver at the cell
// center with the given fixed orientation and sweep all beam pairs with the
// 3-read-max protocol. Static mode stores the overall best pair. Dynamic
// mode additionally classifies pairs by transmit angle: within los_cone_deg
// of the geometric direction to the cell they count as the direct-link
// class, everything else as the reflected-link class; the best of each class
// is stored. The dynamic obstacle is absent during construction.
inline Bim construct_bim(const Scene& scene, const GridSpec& grid, const Codebook& cb, BimMode mode,
                         double rx_orientation_deg = 0.0,
                         std::optional<MeasurementNoise> noise_override = std::nullopt,
                         std::uint64_t seed = 0, double los_cone_deg = 15.0) {
  validate_grid(grid);
  validate_codebook(cb);
  const Point2 far_corner{grid.origin.x + grid.cell_m * grid.nx,
                          grid.origin.y + grid.cell_m * grid.ny};
  if (!scene.bounds.contains(grid.origin) || !scene.bounds.contains(far_corner)) {
    throw std::invalid_argument("grid outside scene bounds");
  }

  MeasurementNoise noise;
  noise.sigma_db = noise_override ? noise_override->sigma_db : scene.radio.noise_sigma_db;
  if (noise_override) {
    noise.reads = noise_override->reads;
  }

  Bim bim;
  bim.grid = grid;
  bim.profile = cb;
  bim.profile_hash = profile_hash(cb);
  bim.construction.mode = mode;
  bim.construction.seed = seed;
  bim.construction.rx_orientation_deg = rx_orientation_deg;
  bim.construction.noise_sigma_db = noise.sigma_db;
  bim.construction.los_cone_deg = los_cone_deg;
  bim.construction.created = detail::today_utc();
  bim.records.reserve(static_cast<std::size_t>(grid.num_cells()));

  for (int id = 1; id <= grid.num_cells(); ++id) {
    const Point2 center = grid.center(id);
    const Pose rx{center, rx_orientation_deg, 0.0};
    const ChannelPaths paths = resolve_paths(scene, rx, std::nullopt);
    const double geo_dir =
        normalize_deg(link_angle_deg(scene.tx.position, center) - scene.tx.orientation_deg);

    struct Best {
      bool set = false;
      double power = 0.0;
      BeamPair pair;
    };
    Best overall, direct, reflected;
    auto consider = [](Best& b, double power, BeamIndex t, BeamIndex r) {
      if (!b.set || power > b.power) {  // ties keep the lower (tx, rx) pair
        b.set = true;
        b.power = power;
        b.pair = BeamPair{t, r};
      }
    };

    detail::sweep_pairs(
        scene, paths, cb, noise,
        [&](int t, int r) {
          return construction_measurement_seed(seed, id, BeamIndex{t}, BeamIndex{r});
        },
        [&](BeamIndex t, BeamIndex r, double power) {
          ++bim.construction.pair_evaluations;
          consider(overall, power, t, r);
          if (mode == BimMode::kDynamic) {
            const bool in_cone = std::abs(normalize_deg(cb.angle_of(t) - geo_dir)) <= los_cone_deg;
            consider(in_cone ? direct : reflected, power, t, r);
          }
        });

    BimRecord rec;
    rec.grid_id = id;
    rec.center = center;
    if (mode == BimMode::kStatic) {
      rec.los_pair = overall.pair;
      rec.los_power_dbm = overall.power;
    } else {
      // A cell whose geometric direction falls outside the codebook can have
      // an empty direct class; fall back to the overall best.
      const Best& f = direct.set ? direct : overall;
      rec.los_pair = f.pair;
      rec.los_power_dbm = f.power;
      if (reflected.set) {
        rec.nlos_pair = reflected.pair;
        rec.nlos_power_dbm = reflected.power;
      }
    }
    bim.records.push_back(rec);
  }
  return bim;
}

// Nearest grid center by squared Euclidean distance; ties to the lower id.
// Total over the plane, so positions outside the mapped area return the
// nearest boundary cell.
inline int locate_grid(const Bim& bim, Point2 q_hat) {
  int best = 1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const BimRecord& rec : bim.records) {
    const Point2 d = q_hat - rec.center;
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = rec.grid_id;
    }
  }
  return best;
}

// Orientation refinement of the stored receive beam: nearest codebook beam
// to angle(stored) + omega, clamped at the codebook edges. omega = 0 returns
// the stored index.
inline BeamIndex refine_rx_beam(const Bim& bim, const Codebook& cb, int grid_id, double omega_deg) {
  const BimRecord& rec = bim.record(grid_id);
  const double target = cb.angle_of(rec.los_pair.rx) + omega_deg;
  return nearest_beam(cb, target);
}

}  // namespace ckm
