// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "cfmimo/channel.hpp"
#include "cfmimo/model.hpp"

using namespace cfmimo;

namespace {

SystemConfig base_config() {
  SystemConfig c;
  c.num_aps = 1;
  c.num_ues = 2;
  c.ap_antennas = 1;
  c.ue_antennas = 1;
  c.num_subcarriers = 1;
  c.codebook_size = 2;
  c.pilot_clusters = 1;
  c.sampled_subcarriers = {1};
  return c;
}

// Tensor with one scalar block per UE whose squared magnitude is `energy[k]`.
ChannelTensor scalar_tensor(const std::vector<double>& energy) {
  ChannelTensor t;
  t.dims = {1, static_cast<int>(energy.size()), 1, 1};
  t.num_subcarriers = 1;
  Mat h(1, t.dims.num_ues);
  for (int k = 0; k < t.dims.num_ues; ++k) {
    h(0, k) = cplx(std::sqrt(energy[k]), 0.0);
  }
  t.per_subcarrier = {h};
  return t;
}

}  // namespace

TEST_CASE("noise power matches the closed form") {
  SystemConfig c = base_config();
  c.bandwidth_hz = 1e9;
  c.num_subcarriers = 2048;
  c.noise_figure_db = 7.0;
  // -174 dBm/Hz + 10*log10(1e9/2048) + 7 dB = -110.113299523... dBm
  const double dbm = watt_to_dbm(noise_power_per_subcarrier(c));
  CHECK(dbm == doctest::Approx(-110.113299523037932).epsilon(1e-12));

  SUBCASE("zero noise figure, 1 Hz bin") {
    c.bandwidth_hz = 1.0;
    c.num_subcarriers = 1;
    c.noise_figure_db = 0.0;
    CHECK(noise_power_per_subcarrier(c) ==
          doctest::Approx(3.9810717055349695e-21).epsilon(1e-12));
  }
  SUBCASE("doubling the subcarrier count halves the bin power") {
    const double p1 = noise_power_per_subcarrier(c);
    c.num_subcarriers *= 2;
    CHECK(p1 / noise_power_per_subcarrier(c) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("monotone in the noise figure") {
    const double p1 = noise_power_per_subcarrier(c);
    c.noise_figure_db += 3.0;
    const double p2 = noise_power_per_subcarrier(c);
    CHECK(p2 / p1 == doctest::Approx(db_to_linear(3.0)).epsilon(1e-12));
  }
}

TEST_CASE("single UE gets maximum power") {
  SystemConfig c = base_config();
  c.num_ues = 1;
  c.tx_power_max_dbm = 20.0;
  c.symbol_energy = 1.0;
  ChannelTensor t = scalar_tensor({0.5});
  const auto info = apply_power_control(t, c);
  const double p_max = dbm_to_watt(20.0);
  CHECK(info.tx_power_w[0] == doctest::Approx(p_max).epsilon(1e-12));
  CHECK(info.scale[0] == doctest::Approx(std::sqrt(p_max)).epsilon(1e-12));
  CHECK(info.channel_energy[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(info.target == doctest::Approx(p_max * 0.5).epsilon(1e-12));
}

TEST_CASE("a 2 dB spread is equalized exactly") {
  SystemConfig c = base_config();
  c.power_control_range_db = 3.0;  // window [-6 dB, 0] relative to max
  ChannelTensor t = scalar_tensor({1.0, db_to_linear(2.0)});
  const auto info = apply_power_control(t, c);
  // post-control received energies E_k * P_k are equal
  const double r0 = info.channel_energy[0] * info.tx_power_w[0];
  const double r1 = info.channel_energy[1] * info.tx_power_w[1];
  CHECK(r0 == doctest::Approx(r1).epsilon(1e-12));
  // weak UE at max power
  CHECK(info.tx_power_w[0] == doctest::Approx(dbm_to_watt(c.tx_power_max_dbm)).epsilon(1e-12));
}

TEST_CASE("a 20 dB spread leaves a 14 dB residual at the clamp") {
  SystemConfig c = base_config();
  c.power_control_range_db = 3.0;
  ChannelTensor t = scalar_tensor({1.0, db_to_linear(20.0)});
  const auto info = apply_power_control(t, c);
  const double r0 = info.channel_energy[0] * info.tx_power_w[0];
  const double r1 = info.channel_energy[1] * info.tx_power_w[1];
  CHECK(linear_to_db(r1 / r0) == doctest::Approx(14.0).epsilon(1e-9));
  // strong UE pinned at the lower clamp
  const double floor_w = dbm_to_watt(c.tx_power_max_dbm - 6.0);
  CHECK(info.tx_power_w[1] == doctest::Approx(floor_w).epsilon(1e-12));
}

TEST_CASE("explicit target overrides the automatic rule") {
  SystemConfig c = base_config();
  c.power_control_target = 1e-3;
  ChannelTensor t = scalar_tensor({1.0, 1.0});
  const auto info = apply_power_control(t, c);
  CHECK(info.target == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("scaling preserves the block direction") {
  SystemConfig c = base_config();
  c.num_ues = 2;
  c.num_subcarriers = 2;
  ChannelTensor t;
  t.dims = {1, 2, 2, 2};
  t.num_subcarriers = 2;
  t.per_subcarrier.resize(2);
  RngStream rng(5, "test");
  for (auto& m : t.per_subcarrier) {
    m.resize(2, 4);
    for (int r = 0; r < 2; ++r)
      for (int col = 0; col < 4; ++col) m(r, col) = rng.cgaussian(1.0);
  }
  const ChannelTensor before = t;
  const auto info = apply_power_control(t, c);
  for (int v = 0; v < 2; ++v) {
    for (int k = 0; k < 2; ++k) {
      const Mat b0 = before.at(v).middleCols(2 * k, 2);
      const Mat b1 = t.at(v).middleCols(2 * k, 2);
      // same direction: scaled copy with the advertised positive factor
      CHECK((b1 - info.scale[k] * b0).norm() < 1e-12 * b0.norm());
    }
  }
  // scale encodes sqrt(P_k / Es)
  for (int k = 0; k < 2; ++k) {
    CHECK(info.scale[k] ==
          doctest::Approx(std::sqrt(info.tx_power_w[k] / c.symbol_energy)).epsilon(1e-12));
  }
}

TEST_CASE("zero channel energy is rejected") {
  SystemConfig c = base_config();
  ChannelTensor t = scalar_tensor({1.0, 0.0});
  CHECK_THROWS_AS(apply_power_control(t, c), ZeroChannel);
}
