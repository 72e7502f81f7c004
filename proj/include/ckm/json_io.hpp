// SPDX-License-Identifier: Apache-2.0
//
// Versioned JSON file formats: device profile, scene, BIM, scenario, and
// metric rows. Loading validates invariants and reports bad input as
// ValidationError.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ckm/bim.hpp"
#include "ckm/errors.hpp"
#include "ckm/harness.hpp"

namespace ckm {

using nlohmann::json;

namespace detail {

inline json require(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) {
    throw ValidationError(std::string(what) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

inline void require_format(const json& j, const char* format, const char* what) {
  if (!j.is_object() || !j.contains("format") || j.at("format") != format) {
    throw ValidationError(std::string(what) + ": not a " + format + " file");
  }
}

inline json point_to_json(Point2 p) { return json::array({p.x, p.y}); }

inline Point2 point_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError(std::string(what) + ": expected [x, y]");
  }
  Point2 p{j[0].get<double>(), j[1].get<double>()};
  if (!is_finite(p)) {
    throw ValidationError(std::string(what) + ": non-finite coordinates");
  }
  return p;
}

inline std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t hex64_parse(const std::string& s, const char* what) {
  if (s.empty()) {
    throw ValidationError(std::string(what) + ": empty hash");
  }
  return std::strtoull(s.c_str(), nullptr, 16);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Device profile

inline json profile_to_json(const Codebook& cb) {
  json j;
  j["format"] = "ckm-device-profile";
  j["version"] = 1;
  j["num_beams"] = cb.num_beams();
  j["num_elements"] = cb.num_elements;
  j["element_spacing_wavelengths"] = cb.element_spacing;
  j["angle_first_deg"] = cb.angles_deg.front();
  j["angle_last_deg"] = cb.angles_deg.back();
  j["angles_deg"] = cb.angles_deg;
  return j;
}

inline Codebook profile_from_json(const json& j) {
  detail::require_format(j, "ckm-device-profile", "device profile");
  Codebook cb;
  cb.num_elements = detail::require(j, "num_elements", "device profile").get<int>();
  cb.element_spacing =
      detail::require(j, "element_spacing_wavelengths", "device profile").get<double>();
  if (j.contains("angles_deg") && !j.at("angles_deg").is_null()) {
    cb.angles_deg = j.at("angles_deg").get<std::vector<double>>();
  } else {
    const int n = detail::require(j, "num_beams", "device profile").get<int>();
    const double first = detail::require(j, "angle_first_deg", "device profile").get<double>();
    const double last = detail::require(j, "angle_last_deg", "device profile").get<double>();
    cb = Codebook::uniform(n, first, last, cb.num_elements, cb.element_spacing);
  }
  if (j.contains("num_beams") && j.at("num_beams").get<int>() != cb.num_beams()) {
    throw ValidationError("device profile: num_beams disagrees with angles_deg");
  }
  try {
    validate_codebook(cb);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("device profile: ") + e.what());
  }
  return cb;
}

// ---------------------------------------------------------------------------
// Scene

inline json scene_to_json(const Scene& s) {
  json j;
  j["format"] = "ckm-scene";
  j["version"] = 1;
  j["bounds"] = {{"min", detail::point_to_json(s.bounds.min)},
                 {"max", detail::point_to_json(s.bounds.max)}};
  j["tx"] = {{"position", detail::point_to_json(s.tx.position)},
             {"orientation_deg", s.tx.orientation_deg}};
  j["walls"] = json::array();
  for (const Wall& w : s.walls) {
    j["walls"].push_back({{"a", detail::point_to_json(w.seg.a)},
                          {"b", detail::point_to_json(w.seg.b)},
                          {"attenuation_db", w.attenuation_db}});
  }
  j["reflectors"] = json::array();
  for (const Reflector& r : s.reflectors) {
    j["reflectors"].push_back({{"a", detail::point_to_json(r.seg.a)},
                               {"b", detail::point_to_json(r.seg.b)},
                               {"loss_db", r.loss_db}});
  }
  if (s.obstacle) {
    json o;
    o["half_length_m"] = s.obstacle->half_length_m;
    if (std::isfinite(s.obstacle->attenuation_db)) {
      o["attenuation_db"] = s.obstacle->attenuation_db;
    } else {
      o["attenuation_db"] = nullptr;  // null means opaque
    }
    j["obstacle"] = o;
  } else {
    j["obstacle"] = nullptr;
  }
  j["radio"] = {{"carrier_hz", s.radio.carrier_hz},
                {"tx_power_dbm", s.radio.tx_power_dbm},
                {"noise_floor_dbm", s.radio.noise_floor_dbm},
                {"noise_sigma_db", s.radio.noise_sigma_db},
                {"blocking_cutoff_db", s.radio.blocking_cutoff_db}};
  return j;
}

inline Scene scene_from_json(const json& j) {
  detail::require_format(j, "ckm-scene", "scene");
  Scene s;
  const json bounds = detail::require(j, "bounds", "scene");
  s.bounds.min = detail::point_from_json(detail::require(bounds, "min", "scene bounds"), "scene bounds min");
  s.bounds.max = detail::point_from_json(detail::require(bounds, "max", "scene bounds"), "scene bounds max");
  const json tx = detail::require(j, "tx", "scene");
  s.tx.position = detail::point_from_json(detail::require(tx, "position", "scene tx"), "scene tx position");
  s.tx.orientation_deg = normalize_deg(detail::require(tx, "orientation_deg", "scene tx").get<double>());
  for (const json& w : j.value("walls", json::array())) {
    Wall wall;
    wall.seg.a = detail::point_from_json(detail::require(w, "a", "wall"), "wall a");
    wall.seg.b = detail::point_from_json(detail::require(w, "b", "wall"), "wall b");
    wall.attenuation_db = detail::require(w, "attenuation_db", "wall").get<double>();
    s.walls.push_back(wall);
  }
  for (const json& r : j.value("reflectors", json::array())) {
    Reflector refl;
    refl.seg.a = detail::point_from_json(detail::require(r, "a", "reflector"), "reflector a");
    refl.seg.b = detail::point_from_json(detail::require(r, "b", "reflector"), "reflector b");
    refl.loss_db = detail::require(r, "loss_db", "reflector").get<double>();
    s.reflectors.push_back(refl);
  }
  if (j.contains("obstacle") && !j.at("obstacle").is_null()) {
    ObstacleSpec o;
    o.half_length_m = detail::require(j.at("obstacle"), "half_length_m", "obstacle").get<double>();
    const json att = j.at("obstacle").value("attenuation_db", json());
    o.attenuation_db =
        att.is_number() ? att.get<double>() : std::numeric_limits<double>::infinity();
    s.obstacle = o;
  }
  if (j.contains("radio")) {
    const json r = j.at("radio");
    s.radio.carrier_hz = r.value("carrier_hz", s.radio.carrier_hz);
    s.radio.tx_power_dbm = r.value("tx_power_dbm", s.radio.tx_power_dbm);
    s.radio.noise_floor_dbm = r.value("noise_floor_dbm", s.radio.noise_floor_dbm);
    s.radio.noise_sigma_db = r.value("noise_sigma_db", s.radio.noise_sigma_db);
    s.radio.blocking_cutoff_db = r.value("blocking_cutoff_db", s.radio.blocking_cutoff_db);
  }
  try {
    validate_scene(s);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("scene: ") + e.what());
  }
  return s;
}

inline std::uint64_t scene_hash(const Scene& s) { return fnv1a64(scene_to_json(s).dump()); }

// ---------------------------------------------------------------------------
// BIM

inline json bim_to_json(const Bim& bim) {
  json j;
  j["format"] = "ckm-bim";
  j["version"] = 1;
  j["grid"] = {{"origin", detail::point_to_json(bim.grid.origin)},
               {"cell_m", bim.grid.cell_m},
               {"nx", bim.grid.nx},
               {"ny", bim.grid.ny}};
  j["profile"] = profile_to_json(bim.profile);
  j["profile_hash"] = detail::hex64(bim.profile_hash);
  j["construction"] = {
      {"mode", bim.construction.mode == BimMode::kStatic ? "static" : "dynamic"},
      {"seed", bim.construction.seed},
      {"rx_orientation_deg", bim.construction.rx_orientation_deg},
      {"noise_sigma_db", bim.construction.noise_sigma_db},
      {"los_cone_deg", bim.construction.los_cone_deg},
      {"scene_hash", detail::hex64(bim.construction.scene_hash)},
      {"pair_evaluations", bim.construction.pair_evaluations},
      {"created", bim.construction.created}};
  j["records"] = json::array();
  for (const BimRecord& rec : bim.records) {
    json r;
    r["grid_id"] = rec.grid_id;
    r["center"] = detail::point_to_json(rec.center);
    r["los"] = {{"tx_beam", rec.los_pair.tx.value},
                {"rx_beam", rec.los_pair.rx.value},
                {"power_dbm", rec.los_power_dbm}};
    if (rec.nlos_pair) {
      r["nlos"] = {{"tx_beam", rec.nlos_pair->tx.value},
                   {"rx_beam", rec.nlos_pair->rx.value},
                   {"power_dbm", rec.nlos_power_dbm.value_or(0.0)}};
    } else {
      r["nlos"] = nullptr;
    }
    j["records"].push_back(r);
  }
  return j;
}

inline Bim bim_from_json(const json& j) {
  detail::require_format(j, "ckm-bim", "BIM");
  Bim bim;
  const json grid = detail::require(j, "grid", "BIM");
  bim.grid.origin = detail::point_from_json(detail::require(grid, "origin", "BIM grid"), "BIM grid origin");
  bim.grid.cell_m = detail::require(grid, "cell_m", "BIM grid").get<double>();
  bim.grid.nx = detail::require(grid, "nx", "BIM grid").get<int>();
  bim.grid.ny = detail::require(grid, "ny", "BIM grid").get<int>();
  try {
    validate_grid(bim.grid);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("BIM grid: ") + e.what());
  }
  bim.profile = profile_from_json(detail::require(j, "profile", "BIM"));
  bim.profile_hash =
      detail::hex64_parse(detail::require(j, "profile_hash", "BIM").get<std::string>(), "BIM profile hash");
  if (bim.profile_hash != profile_hash(bim.profile)) {
    throw ValidationError("BIM: device profile hash mismatch");
  }
  const json c = detail::require(j, "construction", "BIM");
  const std::string mode = detail::require(c, "mode", "BIM construction").get<std::string>();
  if (mode == "static") {
    bim.construction.mode = BimMode::kStatic;
  } else if (mode == "dynamic") {
    bim.construction.mode = BimMode::kDynamic;
  } else {
    throw ValidationError("BIM construction: unknown mode '" + mode + "'");
  }
  bim.construction.seed = c.value("seed", 0ull);
  bim.construction.rx_orientation_deg = c.value("rx_orientation_deg", 0.0);
  bim.construction.noise_sigma_db = c.value("noise_sigma_db", 0.0);
  bim.construction.los_cone_deg = c.value("los_cone_deg", 15.0);
  bim.construction.scene_hash = detail::hex64_parse(c.value("scene_hash", std::string("0")), "BIM scene hash");
  bim.construction.pair_evaluations = c.value("pair_evaluations", 0ull);
  bim.construction.created = c.value("created", std::string());

  const json records = detail::require(j, "records", "BIM");
  const int cells = bim.grid.num_cells();
  if (static_cast<int>(records.size()) > cells) {
    throw ValidationError("BIM: more records than grid cells");
  }
  std::vector<bool> seen(static_cast<std::size_t>(cells), false);
  bim.records.resize(static_cast<std::size_t>(cells));
  auto pair_from = [&](const json& p, const char* what) {
    BeamPair out{BeamIndex{detail::require(p, "tx_beam", what).get<int>()},
                 BeamIndex{detail::require(p, "rx_beam", what).get<int>()}};
    if (!bim.profile.contains(out.tx) || !bim.profile.contains(out.rx)) {
      throw ValidationError(std::string(what) + ": index out of codebook");
    }
    return out;
  };
  for (const json& r : records) {
    BimRecord rec;
    rec.grid_id = detail::require(r, "grid_id", "BIM record").get<int>();
    if (rec.grid_id < 1 || rec.grid_id > cells) {
      throw ValidationError("BIM record: grid id outside grid");
    }
    if (seen[static_cast<std::size_t>(rec.grid_id - 1)]) {
      throw ValidationError("BIM record: duplicate grid id");
    }
    seen[static_cast<std::size_t>(rec.grid_id - 1)] = true;
    rec.center = detail::point_from_json(detail::require(r, "center", "BIM record"), "BIM record center");
    const Point2 expect = bim.grid.center(rec.grid_id);
    if (rec.center != expect) {
      throw ValidationError("BIM record: center disagrees with grid spec");
    }
    const json los = detail::require(r, "los", "BIM record");
    rec.los_pair = pair_from(los, "BIM record los");
    rec.los_power_dbm = detail::require(los, "power_dbm", "BIM record los").get<double>();
    if (r.contains("nlos") && !r.at("nlos").is_null()) {
      rec.nlos_pair = pair_from(r.at("nlos"), "BIM record nlos");
      rec.nlos_power_dbm = detail::require(r.at("nlos"), "power_dbm", "BIM record nlos").get<double>();
    }
    bim.records[static_cast<std::size_t>(rec.grid_id - 1)] = rec;
  }
  for (int id = 1; id <= cells; ++id) {
    if (!seen[static_cast<std::size_t>(id - 1)]) {
      throw ValidationError("incomplete BIM: missing record for grid id " + std::to_string(id));
    }
  }
  return bim;
}

// ---------------------------------------------------------------------------
// Scenario

inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["format"] = "ckm-scenario";
  j["version"] = 1;
  j["scene"] = sc.scene_path;
  j["bim"] = sc.bim_path.empty() ? json() : json(sc.bim_path);
  j["profile"] = sc.profile_path.empty() ? json() : json(sc.profile_path);
  j["strategies"] = json::array();
  for (StrategyKind k : sc.strategies) {
    j["strategies"].push_back(strategy_name(k));
  }
  auto traj_to_json = [](const Trajectory& traj) {
    json arr = json::array();
    for (const Waypoint& w : traj) {
      arr.push_back({{"t", w.t_s},
                     {"position", detail::point_to_json(w.position)},
                     {"orientation_deg", w.orientation_deg}});
    }
    return arr;
  };
  j["rx_trajectory"] = traj_to_json(sc.rx_trajectory);
  j["obstacle_trajectory"] = sc.obstacle_trajectory ? traj_to_json(*sc.obstacle_trajectory) : json();
  j["sensors"] = {{"uwb_sigma_m", sc.sensors.uwb_sigma_m},
                  {"uwb_rate_hz", sc.sensors.uwb_rate_hz},
                  {"gyro_sigma_deg", sc.sensors.gyro_sigma_deg},
                  {"gyro_rate_hz", sc.sensors.gyro_rate_hz}};
  j["eta_m"] = sc.dynamic.eta_m;
  j["duration_s"] = sc.duration_s;
  j["decision_rate_hz"] = sc.decision_rate_hz;
  j["seed"] = sc.seed;
  j["d_o_normal"] = sc.d_o_normal ? detail::point_to_json(*sc.d_o_normal) : json();
  return j;
}

inline Scenario scenario_from_json(const json& j) {
  detail::require_format(j, "ckm-scenario", "scenario");
  Scenario sc;
  sc.scene_path = detail::require(j, "scene", "scenario").get<std::string>();
  if (j.contains("bim") && !j.at("bim").is_null()) {
    sc.bim_path = j.at("bim").get<std::string>();
  }
  if (j.contains("profile") && !j.at("profile").is_null()) {
    sc.profile_path = j.at("profile").get<std::string>();
  }
  for (const json& s : detail::require(j, "strategies", "scenario")) {
    const auto kind = parse_strategy(s.get<std::string>());
    if (!kind) {
      throw ValidationError("scenario: unknown strategy '" + s.get<std::string>() + "'");
    }
    sc.strategies.push_back(*kind);
  }
  auto traj_from_json = [](const json& arr, const char* what) {
    Trajectory traj;
    for (const json& w : arr) {
      Waypoint wp;
      wp.t_s = detail::require(w, "t", what).get<double>();
      wp.position = detail::point_from_json(detail::require(w, "position", what), what);
      wp.orientation_deg = detail::require(w, "orientation_deg", what).get<double>();
      traj.push_back(wp);
    }
    return traj;
  };
  sc.rx_trajectory = traj_from_json(detail::require(j, "rx_trajectory", "scenario"), "rx waypoint");
  if (j.contains("obstacle_trajectory") && !j.at("obstacle_trajectory").is_null()) {
    sc.obstacle_trajectory = traj_from_json(j.at("obstacle_trajectory"), "obstacle waypoint");
  }
  if (j.contains("sensors")) {
    const json s = j.at("sensors");
    sc.sensors.uwb_sigma_m = s.value("uwb_sigma_m", sc.sensors.uwb_sigma_m);
    sc.sensors.uwb_rate_hz = s.value("uwb_rate_hz", sc.sensors.uwb_rate_hz);
    sc.sensors.gyro_sigma_deg = s.value("gyro_sigma_deg", sc.sensors.gyro_sigma_deg);
    sc.sensors.gyro_rate_hz = s.value("gyro_rate_hz", sc.sensors.gyro_rate_hz);
  }
  sc.dynamic.eta_m = j.value("eta_m", sc.dynamic.eta_m);
  sc.duration_s = detail::require(j, "duration_s", "scenario").get<double>();
  sc.decision_rate_hz = detail::require(j, "decision_rate_hz", "scenario").get<double>();
  sc.seed = j.value("seed", 0ull);
  if (j.contains("sensors") && j.at("sensors").contains("seed")) {
    sc.sensors.seed = j.at("sensors").at("seed").get<std::uint64_t>();
  } else {
    sc.sensors.seed = mix_seed(sc.seed, 0x5EA5ull);
  }
  if (j.contains("d_o_normal") && !j.at("d_o_normal").is_null()) {
    Point2 n = detail::point_from_json(j.at("d_o_normal"), "scenario d_o_normal");
    const double len = norm(n);
    if (!(len > 0.0)) {
      throw ValidationError("scenario: d_o_normal must be nonzero");
    }
    sc.d_o_normal = (1.0 / len) * n;
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Metrics

inline json metrics_to_json(const std::vector<MetricsRow>& rows) {
  json j;
  j["format"] = "ckm-metrics";
  j["version"] = 1;
  j["rows"] = json::array();
  for (const MetricsRow& r : rows) {
    json row;
    row["t"] = r.t_s;
    row["strategy"] = r.strategy;
    row["rx_power_dbm"] = r.rx_power_dbm;
    row["tx_beam"] = r.tx_beam.value;
    row["rx_beam"] = r.rx_beam.value;
    row["link_choice"] = link_choice_name(r.link);
    row["d_o"] = r.d_o_m ? json(*r.d_o_m) : json();
    row["r"] = r.r ? json(*r.r) : json();
    row["commands_sent"] = r.commands_sent;
    row["sweeps_used"] = r.sweeps_used;
    j["rows"].push_back(row);
  }
  return j;
}

inline std::vector<MetricsRow> metrics_from_json(const json& j) {
  detail::require_format(j, "ckm-metrics", "metrics");
  std::vector<MetricsRow> rows;
  for (const json& r : detail::require(j, "rows", "metrics")) {
    MetricsRow row;
    row.t_s = detail::require(r, "t", "metrics row").get<double>();
    row.strategy = detail::require(r, "strategy", "metrics row").get<std::string>();
    row.rx_power_dbm = detail::require(r, "rx_power_dbm", "metrics row").get<double>();
    row.tx_beam.value = detail::require(r, "tx_beam", "metrics row").get<int>();
    row.rx_beam.value = detail::require(r, "rx_beam", "metrics row").get<int>();
    const std::string link = detail::require(r, "link_choice", "metrics row").get<std::string>();
    if (link == "los") {
      row.link = LinkChoice::kLoS;
    } else if (link == "nlos") {
      row.link = LinkChoice::kNLoS;
    } else if (link == "n/a") {
      row.link = LinkChoice::kNone;
    } else {
      throw ValidationError("metrics row: unknown link choice '" + link + "'");
    }
    if (r.contains("d_o") && !r.at("d_o").is_null()) {
      row.d_o_m = r.at("d_o").get<double>();
    }
    if (r.contains("r") && !r.at("r").is_null()) {
      row.r = r.at("r").get<double>();
    }
    row.commands_sent = detail::require(r, "commands_sent", "metrics row").get<int>();
    row.sweeps_used = detail::require(r, "sweeps_used", "metrics row").get<long>();
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Files

inline json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file: " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline Scene load_scene(const std::filesystem::path& path) { return scene_from_json(load_json(path)); }
inline Codebook load_profile(const std::filesystem::path& path) { return profile_from_json(load_json(path)); }
inline Bim load_bim(const std::filesystem::path& path) { return bim_from_json(load_json(path)); }
inline Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(load_json(path)); }

inline void save_scene(const Scene& s, const std::filesystem::path& path) { write_json(path, scene_to_json(s)); }
inline void save_profile(const Codebook& cb, const std::filesystem::path& path) { write_json(path, profile_to_json(cb)); }
inline void save_bim(const Bim& bim, const std::filesystem::path& path) { write_json(path, bim_to_json(bim)); }
inline void save_scenario(const Scenario& sc, const std::filesystem::path& path) { write_json(path, scenario_to_json(sc)); }

// Scenario plus everything it references, resolved relative to its directory.
struct LoadedScenario {
  Scenario scenario;
  Scene scene;
  Codebook profile;
  std::optional<Bim> bim;
};

inline LoadedScenario load_scenario_bundle(const std::filesystem::path& scenario_path) {
  LoadedScenario out;
  out.scenario = load_scenario(scenario_path);
  const std::filesystem::path base = scenario_path.parent_path();
  auto resolve = [&](const std::string& ref) {
    const std::filesystem::path p(ref);
    return p.is_absolute() ? p : base / p;
  };
  out.scene = load_scene(resolve(out.scenario.scene_path));
  out.profile =
      out.scenario.profile_path.empty() ? Codebook::uniform() : load_profile(resolve(out.scenario.profile_path));
  if (!out.scenario.bim_path.empty()) {
    out.bim = load_bim(resolve(out.scenario.bim_path));
  }
  return out;
}

inline std::vector<MetricsRow> run_episode(const LoadedScenario& bundle) {
  return run_episode(bundle.scenario, bundle.scene, bundle.profile, bundle.bim);
}

}  // namespace ckm
