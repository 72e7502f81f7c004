// SPDX-License-Identifier: Apache-2.0
//
// ckm: command-line front end for the beam-alignment simulator.
//
//   ckm build   --scene <file> --grid ox,oy,cell,nx,ny --mode static|dynamic --out <file>
//   ckm run     --scenario <file> --out <csv> [--json <file>]
//   ckm preset  <exp1-los|exp2-nlos|exp3-dynamic> --out-dir <dir>
//   ckm sweep   --scene <file> --rx x,y,omega [--out <csv>]
//
// Exit codes: 0 ok, 2 validation error, 3 runtime error.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ckm/ckm.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_csv_numbers(const std::string& text, std::size_t expect,
                                      const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw ckm::ValidationError(std::string(what) + ": bad number '" + item + "'");
    }
  }
  if (out.size() != expect) {
    throw ckm::ValidationError(std::string(what) + ": expected " + std::to_string(expect) +
                               " comma-separated values");
  }
  return out;
}

int cmd_build(const std::string& scene_path, const std::string& grid_text, const std::string& mode,
              const std::string& out_path, const std::string& profile_path, double rx_orientation,
              std::uint64_t seed, double noise_sigma, bool noise_given, double cone_deg) {
  const ckm::Scene scene = ckm::load_scene(scene_path);
  const ckm::Codebook cb =
      profile_path.empty() ? ckm::Codebook::uniform() : ckm::load_profile(profile_path);
  const auto g = parse_csv_numbers(grid_text, 5, "--grid");
  ckm::GridSpec grid{{g[0], g[1]}, g[2], static_cast<int>(g[3]), static_cast<int>(g[4])};
  ckm::BimMode bim_mode;
  if (mode == "static") {
    bim_mode = ckm::BimMode::kStatic;
  } else if (mode == "dynamic") {
    bim_mode = ckm::BimMode::kDynamic;
  } else {
    throw ckm::ValidationError("--mode must be static or dynamic");
  }
  std::optional<ckm::MeasurementNoise> noise;
  if (noise_given) {
    noise = ckm::MeasurementNoise{noise_sigma, 3};
  }
  try {
    ckm::Bim bim = ckm::construct_bim(scene, grid, cb, bim_mode, rx_orientation, noise, seed, cone_deg);
    bim.construction.scene_hash = ckm::scene_hash(scene);
    ckm::save_bim(bim, out_path);
    std::cout << "built BIM: " << bim.records.size() << " cells, "
              << bim.construction.pair_evaluations << " pair evaluations -> " << out_path << "\n";
  } catch (const std::invalid_argument& e) {
    throw ckm::ValidationError(e.what());
  }
  return 0;
}

int cmd_run(const std::string& scenario_path, const std::string& csv_path,
            const std::string& json_path) {
  const ckm::LoadedScenario bundle = ckm::load_scenario_bundle(scenario_path);
  std::vector<ckm::MetricsRow> rows;
  try {
    rows = ckm::run_episode(bundle);
  } catch (const std::invalid_argument& e) {
    throw ckm::ValidationError(e.what());
  }
  ckm::write_text(csv_path, ckm::metrics_to_csv(rows));
  if (!json_path.empty()) {
    ckm::write_json(json_path, ckm::metrics_to_json(rows));
  }
  std::cout << "wrote " << rows.size() << " rows -> " << csv_path << "\n";
  return 0;
}

int cmd_preset(const std::string& name, const std::string& out_dir) {
  const auto preset = ckm::make_preset(name);
  if (!preset) {
    throw ckm::ValidationError("unknown preset '" + name + "'");
  }
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  ckm::save_scene(preset->scene, dir / preset->scene_file());
  ckm::save_profile(preset->profile, dir / preset->profile_file());
  ckm::save_scenario(preset->scenario, dir / preset->scenario_file());
  const ckm::GridSpec& g = preset->grid;
  std::cout << "wrote " << (dir / preset->scene_file()).string() << "\n"
            << "wrote " << (dir / preset->profile_file()).string() << "\n"
            << "wrote " << (dir / preset->scenario_file()).string() << "\n"
            << "next:\n"
            << "  ckm build --scene " << (dir / preset->scene_file()).string() << " --grid " << g.origin.x
            << "," << g.origin.y << "," << g.cell_m << "," << g.nx << "," << g.ny << " --mode "
            << (preset->mode == ckm::BimMode::kStatic ? "static" : "dynamic") << " --rx-orientation "
            << preset->construction_orientation_deg << " --seed " << preset->construction_seed
            << " --profile " << (dir / preset->profile_file()).string() << " --out "
            << (dir / preset->bim_file()).string() << "\n"
            << "  ckm run --scenario " << (dir / preset->scenario_file()).string() << " --out "
            << (dir / (preset->name + ".csv")).string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& scene_path, const std::string& rx_text,
              const std::string& profile_path, std::uint64_t seed, const std::string& out_path) {
  const ckm::Scene scene = ckm::load_scene(scene_path);
  const ckm::Codebook cb =
      profile_path.empty() ? ckm::Codebook::uniform() : ckm::load_profile(profile_path);
  const auto v = parse_csv_numbers(rx_text, 3, "--rx");
  const ckm::Pose rx{{v[0], v[1]}, ckm::normalize_deg(v[2]), 0.0};
  ckm::ChannelPaths paths;
  try {
    paths = ckm::resolve_paths(scene, rx);
  } catch (const std::invalid_argument& e) {
    throw ckm::ValidationError(e.what());
  }
  ckm::MeasurementNoise noise;
  noise.sigma_db = scene.radio.noise_sigma_db;
  std::string csv = "tx_beam,rx_beam,rx_power_dbm\n";
  char buf[64];
  ckm::detail::sweep_pairs(
      scene, paths, cb, noise,
      [&](int t, int r) {
        return ckm::mix_seed(seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(r));
      },
      [&](ckm::BeamIndex t, ckm::BeamIndex r, double power) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.12g\n", t.value, r.value, power);
        csv += buf;
      });
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    ckm::write_text(out_path, csv);
    std::cout << "wrote 64x64 sweep -> " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic mmWave beam-alignment simulator"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build", "construct a beam index map by exhaustive sweeping");
  std::string b_scene, b_grid, b_mode = "static", b_out, b_profile;
  double b_orientation = 0.0, b_noise = 0.0, b_cone = 15.0;
  bool b_noise_given = false;
  std::uint64_t b_seed = 0;
  build->add_option("--scene", b_scene, "scene JSON file")->required();
  build->add_option("--grid", b_grid, "grid spec ox,oy,cell,nx,ny")->required();
  build->add_option("--mode", b_mode, "static or dynamic")->required();
  build->add_option("--out", b_out, "output BIM JSON file")->required();
  build->add_option("--profile", b_profile, "device profile JSON (default built-in 64x16)");
  build->add_option("--rx-orientation", b_orientation, "receiver orientation during construction, deg");
  build->add_option("--seed", b_seed, "construction seed");
  auto* noise_opt = build->add_option(
      "--noise-sigma", b_noise, "measurement noise sigma dB (default: scene radio config)");
  build->add_option("--cone", b_cone, "direct-link classification half-angle, deg (dynamic mode)");

  auto* run = app.add_subcommand("run", "play a scenario and export metric rows");
  std::string r_scenario, r_out, r_json;
  run->add_option("--scenario", r_scenario, "scenario JSON file")->required();
  run->add_option("--out", r_out, "output CSV file")->required();
  run->add_option("--json", r_json, "also export rows as JSON");

  auto* preset = app.add_subcommand("preset", "emit a built-in experiment scenario");
  std::string p_name, p_dir = ".";
  preset->add_option("name", p_name, "exp1-los, exp2-nlos or exp3-dynamic")->required();
  preset->add_option("--out-dir", p_dir, "output directory");

  auto* sweep = app.add_subcommand("sweep", "one-shot exhaustive 64x64 sweep table");
  std::string s_scene, s_rx, s_profile, s_out;
  std::uint64_t s_seed = 0;
  sweep->add_option("--scene", s_scene, "scene JSON file")->required();
  sweep->add_option("--rx", s_rx, "receiver pose x,y,omega")->required();
  sweep->add_option("--profile", s_profile, "device profile JSON");
  sweep->add_option("--seed", s_seed, "measurement seed");
  sweep->add_option("--out", s_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  b_noise_given = noise_opt->count() > 0;

  try {
    if (build->parsed()) {
      return cmd_build(b_scene, b_grid, b_mode, b_out, b_profile, b_orientation, b_seed, b_noise,
                       b_noise_given, b_cone);
    }
    if (run->parsed()) {
      return cmd_run(r_scenario, r_out, r_json);
    }
    if (preset->parsed()) {
      return cmd_preset(p_name, p_dir);
    }
    if (sweep->parsed()) {
      return cmd_sweep(s_scene, s_rx, s_profile, s_seed, s_out);
    }
  } catch (const ckm::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
