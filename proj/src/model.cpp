// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/model.hpp"

#include <algorithm>
#include <cmath>

#include "cfmimo/channel.hpp"

namespace cfmimo {

double noise_power_per_subcarrier(const SystemConfig& cfg) {
  const double bin_hz = cfg.bandwidth_hz / cfg.num_subcarriers;
  const double dbm =
      kThermalNoiseDbmHz + 10.0 * std::log10(bin_hz) + cfg.noise_figure_db;
  return dbm_to_watt(dbm);
}

PowerControlInfo apply_power_control(ChannelTensor& tensor,
                                     const SystemConfig& cfg) {
  const Dims dims = tensor.dims;
  const int K = dims.num_ues;
  PowerControlInfo info;
  info.channel_energy.assign(K, 0.0);
  info.tx_power_w.assign(K, 0.0);
  info.scale.assign(K, 0.0);

  for (const Mat& h : tensor.per_subcarrier) {
    for (int k = 0; k < K; ++k) {
      info.channel_energy[k] +=
          h.middleCols(k * dims.ue_antennas, dims.ue_antennas).squaredNorm();
    }
  }
  for (int k = 0; k < K; ++k) {
    if (info.channel_energy[k] <= 0.0) {
      throw ZeroChannel("UE " + std::to_string(k + 1) +
                        " has zero channel energy; cannot power-control");
    }
  }

  const double p_max = dbm_to_watt(cfg.tx_power_max_dbm);
  const double p_min =
      p_max * std::pow(10.0, -2.0 * cfg.power_control_range_db / 10.0);
  const double e_min =
      *std::min_element(info.channel_energy.begin(), info.channel_energy.end());
  info.target = cfg.power_control_target > 0.0 ? cfg.power_control_target
                                               : p_max * e_min;

  for (int k = 0; k < K; ++k) {
    info.tx_power_w[k] =
        std::clamp(info.target / info.channel_energy[k], p_min, p_max);
    info.scale[k] = std::sqrt(info.tx_power_w[k] / cfg.symbol_energy);
  }

#pragma omp parallel for schedule(static)
  for (int v = 0; v < tensor.num_subcarriers; ++v) {
    Mat& h = tensor.per_subcarrier[v];
    for (int k = 0; k < K; ++k) {
      h.middleCols(k * dims.ue_antennas, dims.ue_antennas) *= info.scale[k];
    }
  }
  return info;
}

}  // namespace cfmimo
