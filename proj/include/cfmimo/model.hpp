// SPDX-License-Identifier: Apache-2.0
//
// System-level quantities: per-subcarrier noise power and uplink power
// control applied as per-UE scaling of the channel tensor.
#pragma once

#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

struct ChannelTensor;  // channel.hpp

// Thermal noise power in one subcarrier bin, in watts:
// -174 dBm/Hz + 10*log10(bandwidth / num_subcarriers) + noise figure.
double noise_power_per_subcarrier(const SystemConfig& cfg);

struct PowerControlInfo {
  std::vector<double> channel_energy;  // E_k before scaling (sum over l, v of ||H_{l,k}||_F^2)
  std::vector<double> tx_power_w;      // granted power per UE
  std::vector<double> scale;           // amplitude factor folded into H
  double target = 0.0;                 // received-energy target actually used
};

// Fractional-style power control: every UE aims at the common target
// T = P_max * min_k E_k (or cfg.power_control_target when > 0), clipped to
// [P_max - 2*range, P_max] dB.  The granted amplitude sqrt(P_k / Es) is
// absorbed into the UE's block columns of the tensor, so downstream code
// works with an effective channel and unit-energy symbols.
PowerControlInfo apply_power_control(ChannelTensor& tensor, const SystemConfig& cfg);

}  // namespace cfmimo
