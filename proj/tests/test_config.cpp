// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "cfmimo/config.hpp"

using namespace cfmimo;

namespace {

std::string write_temp(const std::string& body) {
  static int counter = 0;
  std::string path = "test_config_tmp_" + std::to_string(counter++) + ".json";
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kMinimal = R"({
  "system": {
    "num_aps": 2, "num_ues": 4, "ap_antennas": 2, "ue_antennas": 4,
    "num_subcarriers": 16, "codebook_size": 4, "pilot_clusters": 2,
    "carrier_freq_hz": 28e9, "bandwidth_hz": 50e6,
    "sampled_subcarriers": [1, 8, 16], "seed": 3
  },
  "geometry": {"mode": "grid", "area_x_m": 40, "area_y_m": 40, "grid_pitch_m": 5}
})";

}  // namespace

TEST_CASE("load_scenario reads every section") {
  const auto path = write_temp(kMinimal);
  const Scenario s = load_scenario(path);
  std::remove(path.c_str());

  CHECK(s.system.num_aps == 2);
  CHECK(s.system.num_ues == 4);
  CHECK(s.system.ap_antennas == 2);
  CHECK(s.system.ue_antennas == 4);
  CHECK(s.system.num_subcarriers == 16);
  CHECK(s.system.codebook_size == 4);
  CHECK(s.system.pilot_clusters == 2);
  CHECK(s.system.seed == 3);
  CHECK(s.system.tx_power_max_dbm == 20.0);  // default
  CHECK(s.system.sampled_subcarriers == std::vector<int>{1, 8, 16});
  CHECK(s.grid.has_value());
  CHECK(!s.fixed_geometry.has_value());
  CHECK(s.grid->area_x_m == 40.0);
  CHECK(s.system.subcarrier_spacing_hz() == doctest::Approx(50e6 / 16));
  CHECK(s.system.symbol_duration_s() == doctest::Approx(16 / 50e6));
}

TEST_CASE("missing required key raises ConfigError") {
  std::string body = kMinimal;
  const auto pos = body.find("\"num_ues\": 4,");
  body.erase(pos, std::string("\"num_ues\": 4,").size());
  const auto path = write_temp(body);
  CHECK_THROWS_AS(load_scenario(path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("validation rejects inconsistent parameters") {
  SystemConfig c;
  c.num_aps = 2; c.num_ues = 4; c.ap_antennas = 2; c.ue_antennas = 4;
  c.num_subcarriers = 16; c.codebook_size = 4; c.pilot_clusters = 2;
  c.sampled_subcarriers = {1, 16};
  CHECK_NOTHROW(c.validate());

  SUBCASE("cluster count must divide the UE count") {
    c.pilot_clusters = 3;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("sampled subcarriers are 1-based and bounded") {
    c.sampled_subcarriers = {0, 5};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.sampled_subcarriers = {17};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.sampled_subcarriers = {};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("counts must be positive") {
    c.num_aps = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("bandwidth must be positive") {
    c.bandwidth_hz = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
}

TEST_CASE("explicit geometry mode") {
  const char* body = R"({
    "system": {
      "num_aps": 1, "num_ues": 2, "ap_antennas": 2, "ue_antennas": 2,
      "num_subcarriers": 8, "codebook_size": 2, "pilot_clusters": 1,
      "carrier_freq_hz": 28e9, "bandwidth_hz": 50e6,
      "sampled_subcarriers": [1, 8]
    },
    "geometry": {
      "mode": "explicit",
      "ap_positions": [[10, 10, 12]],
      "ap_orientations_deg": [90],
      "ue_positions": [[0, 0, 1.65], [20, 0, 1.65]],
      "ue_orientations_deg": [0, 45]
    }
  })";
  const auto path = write_temp(body);
  const Scenario s = load_scenario(path);
  std::remove(path.c_str());

  REQUIRE(s.fixed_geometry.has_value());
  const Geometry& g = *s.fixed_geometry;
  CHECK(g.ap_positions.size() == 1);
  CHECK(g.ue_positions.size() == 2);
  CHECK(g.ap_orientations[0] == doctest::Approx(kPi / 2));
  CHECK(g.ue_orientations[1] == doctest::Approx(kPi / 4));
  CHECK(g.ap_positions[0].z() == doctest::Approx(12.0));
}

TEST_CASE("scenario hash is stable and sensitive") {
  const auto p1 = write_temp(kMinimal);
  const auto h1 = scenario_hash(load_scenario(p1));
  const auto h2 = scenario_hash(load_scenario(p1));
  std::remove(p1.c_str());
  CHECK(h1 == h2);

  std::string body = kMinimal;
  const auto pos = body.find("\"seed\": 3");
  body.replace(pos, std::string("\"seed\": 3").size(), "\"seed\": 4");
  const auto p2 = write_temp(body);
  const auto h3 = scenario_hash(load_scenario(p2));
  std::remove(p2.c_str());
  CHECK(h1 != h3);
}

TEST_CASE("grid geometry places distinct on-grid UEs with quantized headings") {
  SystemConfig c;
  c.num_aps = 4; c.num_ues = 12; c.ap_antennas = 2; c.ue_antennas = 2;
  c.num_subcarriers = 8; c.codebook_size = 2; c.pilot_clusters = 1;
  c.sampled_subcarriers = {1};
  GridLayout grid;
  grid.area_x_m = 60; grid.area_y_m = 40; grid.grid_pitch_m = 5;

  RngStream rng(9, "geometry", 0);
  const Geometry g = make_grid_geometry(grid, c, rng);
  g.validate(c);

  CHECK(g.ap_positions.size() == 4);
  CHECK(g.ue_positions.size() == 12);

  std::set<std::pair<double, double>> nodes;
  for (const auto& p : g.ue_positions) {
    CHECK(p.x() >= 0.0);
    CHECK(p.x() <= grid.area_x_m);
    CHECK(p.y() >= 0.0);
    CHECK(p.y() <= grid.area_y_m);
    // on-grid coordinates
    CHECK(std::abs(std::remainder(p.x(), grid.grid_pitch_m)) < 1e-9);
    CHECK(std::abs(std::remainder(p.y(), grid.grid_pitch_m)) < 1e-9);
    CHECK(p.z() == doctest::Approx(grid.ue_height_m));
    nodes.insert({p.x(), p.y()});
  }
  CHECK(nodes.size() == g.ue_positions.size());  // no two UEs share a node

  for (double o : g.ue_orientations) {
    const double q = o / (kPi / 4);
    CHECK(std::abs(q - std::round(q)) < 1e-12);
    CHECK(o >= 0.0);
    CHECK(o < kPi);  // four headings: 0, 45, 90, 135 degrees
  }

  // deterministic in the stream
  RngStream rng2(9, "geometry", 0);
  const Geometry g2 = make_grid_geometry(grid, c, rng2);
  for (int k = 0; k < c.num_ues; ++k) {
    CHECK(g.ue_positions[k] == g2.ue_positions[k]);
    CHECK(g.ue_orientations[k] == g2.ue_orientations[k]);
  }
}

TEST_CASE("grid geometry rejects more UEs than nodes") {
  SystemConfig c;
  c.num_aps = 1; c.num_ues = 100; c.ap_antennas = 1; c.ue_antennas = 1;
  c.num_subcarriers = 4; c.codebook_size = 2; c.pilot_clusters = 1;
  c.sampled_subcarriers = {1};
  GridLayout grid;
  grid.area_x_m = 10; grid.area_y_m = 10; grid.grid_pitch_m = 5;  // 9 nodes
  RngStream rng(1, "geometry", 0);
  CHECK_THROWS_AS(make_grid_geometry(grid, c, rng), ConfigError);
}
