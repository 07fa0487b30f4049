// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/config.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cfmimo {

using nlohmann::json;

void SystemConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  require(num_aps >= 1, "num_aps must be >= 1");
  require(num_ues >= 1, "num_ues must be >= 1");
  require(ap_antennas >= 1, "ap_antennas must be >= 1");
  require(ue_antennas >= 1, "ue_antennas must be >= 1");
  require(num_subcarriers >= 1, "num_subcarriers must be >= 1");
  require(codebook_size >= 1, "codebook_size must be >= 1");
  require(pilot_clusters >= 1, "pilot_clusters must be >= 1");
  require(num_ues % pilot_clusters == 0, "pilot_clusters must divide num_ues");
  require(carrier_freq_hz > 0, "carrier_freq_hz must be > 0");
  require(bandwidth_hz > 0, "bandwidth_hz must be > 0");
  require(symbol_energy > 0, "symbol_energy must be > 0");
  require(power_control_range_db >= 0, "power_control_range_db must be >= 0");
  require(!sampled_subcarriers.empty(), "sampled_subcarriers must not be empty");
  for (int v : sampled_subcarriers) {
    require(v >= 1 && v <= num_subcarriers,
            "sampled subcarrier index " + std::to_string(v) + " outside [1, " +
                std::to_string(num_subcarriers) + "]");
  }
  if (codebook_size * pilot_clusters < dims().tx()) {
    std::cerr << "warning: beam-pilot matrix is underdetermined (B*C = "
              << codebook_size * pilot_clusters << " < " << dims().tx()
              << " transmit antennas); pre-BA estimation relies on the "
                 "block-sparsity prior\n";
  }
}

void Geometry::validate(const SystemConfig& cfg) const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("geometry: " + msg);
  };
  require(static_cast<int>(ap_positions.size()) == cfg.num_aps,
          "ap_positions size must equal num_aps");
  require(static_cast<int>(ue_positions.size()) == cfg.num_ues,
          "ue_positions size must equal num_ues");
  require(ap_orientations.size() == ap_positions.size(),
          "ap_orientations size must equal num_aps");
  require(ue_orientations.size() == ue_positions.size(),
          "ue_orientations size must equal num_ues");
  require(ap_height > 0 && ue_height > 0, "heights must be positive");
}

void Scenario::validate() const {
  system.validate();
  if (!grid && !fixed_geometry) {
    throw ConfigError("scenario: either grid or explicit geometry required");
  }
  if (fixed_geometry) fixed_geometry->validate(system);
  if (grid) {
    if (grid->area_x_m <= 0 || grid->area_y_m <= 0 || grid->grid_pitch_m <= 0) {
      throw ConfigError("geometry: grid dimensions must be positive");
    }
  }
}

namespace {

Eigen::Vector3d parse_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError("geometry: positions must be [x, y, z] arrays");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Scenario extract_scenario(const json& j) {
  Scenario s;
  const json& sys = j.at("system");
  SystemConfig& c = s.system;
  c.num_aps = sys.at("num_aps").get<int>();
  c.num_ues = sys.at("num_ues").get<int>();
  c.ap_antennas = sys.at("ap_antennas").get<int>();
  c.ue_antennas = sys.at("ue_antennas").get<int>();
  c.num_subcarriers = sys.at("num_subcarriers").get<int>();
  c.codebook_size = sys.at("codebook_size").get<int>();
  c.pilot_clusters = sys.at("pilot_clusters").get<int>();
  c.carrier_freq_hz = sys.at("carrier_freq_hz").get<double>();
  c.bandwidth_hz = sys.at("bandwidth_hz").get<double>();
  c.tx_power_max_dbm = sys.value("tx_power_max_dbm", 20.0);
  c.power_control_range_db = sys.value("power_control_range_db", 3.0);
  c.noise_figure_db = sys.value("noise_figure_db", 7.0);
  c.symbol_energy = sys.value("symbol_energy", 1.0);
  c.sampled_subcarriers = sys.at("sampled_subcarriers").get<std::vector<int>>();
  c.seed = sys.value("seed", std::uint64_t{1});

  if (j.contains("power_control")) {
    const json& pc = j.at("power_control");
    if (pc.contains("target") && pc.at("target").is_number()) {
      c.power_control_target = pc.at("target").get<double>();
    }
  }

  if (j.contains("channel")) {
    const json& ch = j.at("channel");
    ChannelModelParams& p = s.channel;
    p.mean_nlos_clusters = ch.value("mean_nlos_clusters", p.mean_nlos_clusters);
    p.angular_spread_deg = ch.value("angular_spread_deg", p.angular_spread_deg);
    p.los_decay_distance_m = ch.value("los_decay_distance_m", p.los_decay_distance_m);
    p.shadowing_sigma_db = ch.value("shadowing_sigma_db", p.shadowing_sigma_db);
    p.nlos_extra_loss_db = ch.value("nlos_extra_loss_db", p.nlos_extra_loss_db);
    p.nlos_extra_loss_spread_db =
        ch.value("nlos_extra_loss_spread_db", p.nlos_extra_loss_spread_db);
    p.excess_delay_scale_ns = ch.value("excess_delay_scale_ns", p.excess_delay_scale_ns);
  }

  if (j.contains("chest")) {
    const json& ce = j.at("chest");
    s.chest.mu_alpha = ce.value("mu_alpha", s.chest.mu_alpha);
    s.chest.fbs_tol = ce.value("fbs_tol", s.chest.fbs_tol);
    s.chest.fbs_max_iter = ce.value("fbs_max_iter", s.chest.fbs_max_iter);
  }

  const json& g = j.at("geometry");
  const std::string mode = g.value("mode", std::string("grid"));
  if (mode == "grid") {
    GridLayout grid;
    grid.area_x_m = g.at("area_x_m").get<double>();
    grid.area_y_m = g.at("area_y_m").get<double>();
    grid.grid_pitch_m = g.at("grid_pitch_m").get<double>();
    grid.ap_height_m = g.value("ap_height_m", 12.0);
    grid.ue_height_m = g.value("ue_height_m", 1.65);
    s.grid = grid;
  } else if (mode == "explicit") {
    Geometry geom;
    for (const auto& p : g.at("ap_positions")) geom.ap_positions.push_back(parse_vec3(p));
    for (const auto& p : g.at("ue_positions")) geom.ue_positions.push_back(parse_vec3(p));
    for (double d : g.at("ap_orientations_deg").get<std::vector<double>>()) {
      geom.ap_orientations.push_back(d * kPi / 180.0);
    }
    for (double d : g.at("ue_orientations_deg").get<std::vector<double>>()) {
      geom.ue_orientations.push_back(d * kPi / 180.0);
    }
    geom.ap_height = g.value("ap_height_m", 12.0);
    geom.ue_height = g.value("ue_height_m", 1.65);
    s.fixed_geometry = geom;
  } else {
    throw ConfigError("geometry: mode must be \"grid\" or \"explicit\"");
  }
  return s;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }

  Scenario s;
  try {
    s = extract_scenario(j);
  } catch (const json::exception& e) {
    throw ConfigError("config error in " + path + ": " + e.what());
  }
  s.validate();
  return s;
}

std::uint64_t scenario_hash(const Scenario& s) {
  json j;
  const SystemConfig& c = s.system;
  j["system"] = {{"num_aps", c.num_aps},
                 {"num_ues", c.num_ues},
                 {"ap_antennas", c.ap_antennas},
                 {"ue_antennas", c.ue_antennas},
                 {"num_subcarriers", c.num_subcarriers},
                 {"codebook_size", c.codebook_size},
                 {"pilot_clusters", c.pilot_clusters},
                 {"carrier_freq_hz", c.carrier_freq_hz},
                 {"bandwidth_hz", c.bandwidth_hz},
                 {"tx_power_max_dbm", c.tx_power_max_dbm},
                 {"power_control_range_db", c.power_control_range_db},
                 {"noise_figure_db", c.noise_figure_db},
                 {"symbol_energy", c.symbol_energy},
                 {"sampled_subcarriers", c.sampled_subcarriers},
                 {"seed", c.seed},
                 {"power_control_target", c.power_control_target}};
  const ChannelModelParams& p = s.channel;
  j["channel"] = {{"mean_nlos_clusters", p.mean_nlos_clusters},
                  {"angular_spread_deg", p.angular_spread_deg},
                  {"los_decay_distance_m", p.los_decay_distance_m},
                  {"shadowing_sigma_db", p.shadowing_sigma_db},
                  {"nlos_extra_loss_db", p.nlos_extra_loss_db},
                  {"nlos_extra_loss_spread_db", p.nlos_extra_loss_spread_db},
                  {"excess_delay_scale_ns", p.excess_delay_scale_ns}};
  if (s.grid) {
    j["grid"] = {{"area_x_m", s.grid->area_x_m},
                 {"area_y_m", s.grid->area_y_m},
                 {"grid_pitch_m", s.grid->grid_pitch_m},
                 {"ap_height_m", s.grid->ap_height_m},
                 {"ue_height_m", s.grid->ue_height_m}};
  }
  const std::string dump = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : dump) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Geometry make_grid_geometry(const GridLayout& grid, const SystemConfig& cfg,
                            RngStream& rng) {
  Geometry geom;
  geom.ap_height = grid.ap_height_m;
  geom.ue_height = grid.ue_height_m;

  const int L = cfg.num_aps;
  const int nx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(L))));
  const int ny = (L + nx - 1) / nx;
  const double cx = grid.area_x_m / 2.0;
  const double cy = grid.area_y_m / 2.0;
  for (int i = 0; i < L; ++i) {
    const int ix = i % nx;
    const int iy = i / nx;
    const double x = (ix + 0.5) * grid.area_x_m / nx;
    const double y = (iy + 0.5) * grid.area_y_m / ny;
    geom.ap_positions.emplace_back(x, y, grid.ap_height_m);
    // ULA broadside facing the area center
    geom.ap_orientations.push_back(std::atan2(cy - y, cx - x) + kPi / 2.0);
  }

  const int gx = static_cast<int>(std::floor(grid.area_x_m / grid.grid_pitch_m)) + 1;
  const int gy = static_cast<int>(std::floor(grid.area_y_m / grid.grid_pitch_m)) + 1;
  const std::uint64_t total = static_cast<std::uint64_t>(gx) * gy;
  if (total < static_cast<std::uint64_t>(cfg.num_ues)) {
    throw ConfigError("geometry: grid has fewer nodes than UEs");
  }
  std::set<std::uint64_t> used;
  for (int k = 0; k < cfg.num_ues; ++k) {
    std::uint64_t node;
    do { node = rng.uniform_int(total); } while (used.count(node));
    used.insert(node);
    const double x = static_cast<double>(node % gx) * grid.grid_pitch_m;
    const double y = static_cast<double>(node / gx) * grid.grid_pitch_m;
    geom.ue_positions.emplace_back(x, y, grid.ue_height_m);
    geom.ue_orientations.push_back(static_cast<double>(rng.uniform_int(4)) * kPi / 4.0);
  }
  return geom;
}

}  // namespace cfmimo
