// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfmimo/rng.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

// Static system parameters. All angles are radians and all powers linear
// unless a field name says otherwise; config files use the units documented
// in the README and are converted on load.
struct SystemConfig {
  int num_aps{1};          // L
  int num_ues{1};          // K
  int ap_antennas{1};      // antennas per AP
  int ue_antennas{1};      // antennas per UE
  int num_subcarriers{1};  // OFDM subcarriers
  int codebook_size{1};    // B
  int pilot_clusters{1};   // C, must divide K
  double carrier_freq_hz{28e9};
  double bandwidth_hz{100e6};
  double tx_power_max_dbm{20.0};
  double power_control_range_db{3.0};  // symmetric swing, total window 2x
  double noise_figure_db{7.0};
  double symbol_energy{1.0};  // Es
  std::vector<int> sampled_subcarriers;  // 1-based indices for pre-BA CHEST
  std::uint64_t seed{1};
  // Received-energy target for power control; <= 0 selects the automatic
  // rule (weakest UE at maximum transmit power).
  double power_control_target{0.0};

  Dims dims() const { return {num_aps, num_ues, ap_antennas, ue_antennas}; }
  double subcarrier_spacing_hz() const { return bandwidth_hz / num_subcarriers; }
  double symbol_duration_s() const { return num_subcarriers / bandwidth_hz; }

  // Throws ConfigError on hard violations; prints a warning when the beam
  // pilot matrix is underdetermined (B*C < K*ue_antennas).
  void validate() const;
};

struct Geometry {
  std::vector<Eigen::Vector3d> ap_positions;  // m
  std::vector<double> ap_orientations;        // azimuth of the ULA axis, rad
  std::vector<Eigen::Vector3d> ue_positions;  // m
  std::vector<double> ue_orientations;        // rad
  double ap_height{12.0};
  double ue_height{1.65};

  void validate(const SystemConfig& cfg) const;
};

// Procedural geometry: APs on a fixed centered grid, UEs on random grid
// nodes re-drawn per drop.
struct GridLayout {
  double area_x_m{100.0};
  double area_y_m{100.0};
  double grid_pitch_m{5.0};
  double ap_height_m{12.0};
  double ue_height_m{1.65};
};

// Knobs of the synthetic clustered geometric channel model.
struct ChannelModelParams {
  double mean_nlos_clusters{2.0};
  double angular_spread_deg{10.0};
  // LOS probability exp(-d/decay); <= 0 means LOS always present.
  double los_decay_distance_m{150.0};
  double shadowing_sigma_db{3.0};
  double nlos_extra_loss_db{8.0};
  double nlos_extra_loss_spread_db{4.0};
  double excess_delay_scale_ns{30.0};
};

struct ChestParams {
  double mu_alpha{6.0};  // mu = mu_alpha * sqrt(N0 * ap_antennas * B)
  double fbs_tol{1e-6};
  int fbs_max_iter{500};
};

struct Scenario {
  SystemConfig system;
  ChannelModelParams channel;
  ChestParams chest;
  std::optional<GridLayout> grid;        // procedural mode
  std::optional<Geometry> fixed_geometry;  // explicit mode

  void validate() const;
};

Scenario load_scenario(const std::string& path);

// FNV-1a over the canonical JSON dump; embedded in tensor file headers so
// imported data can be matched to the scenario that produced it.
std::uint64_t scenario_hash(const Scenario& s);

// Places the UEs for one drop. AP placement and orientation are a pure
// function of the layout, UE nodes and orientations come from the stream.
Geometry make_grid_geometry(const GridLayout& grid, const SystemConfig& cfg,
                            RngStream& rng);

}  // namespace cfmimo
