// SPDX-License-Identifier: Apache-2.0
//
// Synthetic frequency-selective channel generation (clustered geometric
// model), per-subcarrier tensor assembly, and the frequency-flat surrogate
// used by beam alignment.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

struct Path {
  cplx gain;        // complex amplitude (path loss, shadowing, phase)
  double delay_s;   // excess delay relative to the earliest arrival
  double aod_rad;   // departure angle at the UE array
  double aoa_rad;   // arrival angle at the AP array
};

struct PathSet {
  Dims dims;
  std::vector<std::vector<Path>> links;  // indexed ap * num_ues + ue

  std::vector<Path>& link(int ap, int ue) { return links[ap * dims.num_ues + ue]; }
  const std::vector<Path>& link(int ap, int ue) const {
    return links[ap * dims.num_ues + ue];
  }
};

// Per-subcarrier channel matrices, each N_R x N_T with n_AP x n_UE blocks.
struct ChannelTensor {
  Dims dims;
  int num_subcarriers = 0;
  std::vector<Mat> per_subcarrier;  // size num_subcarriers

  Mat& at(int v) { return per_subcarrier[v]; }            // 0-based
  const Mat& at(int v) const { return per_subcarrier[v]; }
  Eigen::Block<const Mat> block(int v, int ap, int ue) const {
    return per_subcarrier[v].block(ap * dims.ap_antennas, ue * dims.ue_antennas,
                                   dims.ap_antennas, dims.ue_antennas);
  }
};

// One N_R x N_T matrix whose (ap, ue) block is a verbatim copy of the
// strongest sampled-subcarrier block for that pair.
struct SurrogateMatrix {
  Dims dims;
  Mat h;                              // N_R x N_T
  std::vector<int> chosen_subcarrier;  // 1-based, indexed ap * num_ues + ue

  Mat ue_columns(int ue) const {
    return h.middleCols(ue * dims.ue_antennas, dims.ue_antennas);
  }
};

// ULA response: entry m = exp(-j*pi*cos(angle)*m) / sqrt(n), m = 0..n-1.
Vec steering_vector(double angle_rad, int n);

// Clustered geometric model: optional LOS ray (probability decaying with
// distance) plus a Poisson number of NLOS clusters around the direct
// bearing.  Deterministic given the stream.  Delays are re-referenced so the
// earliest arrival across all links sits at zero.
PathSet generate_paths(const Geometry& geom, const SystemConfig& cfg,
                       const ChannelModelParams& params, RngStream& rng);

// H^v_{l,k} = sum_paths gain * exp(-j*2*pi*f_v*delay) * a_AP a_UE^H with the
// outer product scaled by sqrt(n_AP*n_UE); f_v = v*bandwidth/n_sc (0-based).
// Throws DelayTooLarge if any delay reaches the OFDM symbol duration.
ChannelTensor paths_to_tensor(const PathSet& paths, const SystemConfig& cfg);

// Per (ap, ue) pair, pick the sampled block with maximal squared Frobenius
// norm; ties go to the lowest subcarrier index.  `sampled` is 1-based.
SurrogateMatrix extract_surrogate(const ChannelTensor& tensor,
                                  const std::vector<int>& sampled);

// Keep only each UE's first antenna column (the no-beam-alignment baseline
// channel); dims become (L, K, n_AP, 1).
ChannelTensor slice_first_ue_antenna(const ChannelTensor& tensor);

// Binary tensor import/export ("CFMT" magic, versioned header with dims,
// seed and config hash, row-major per-subcarrier payload).
void save_tensor(const std::string& path, const ChannelTensor& tensor,
                 std::uint64_t seed, std::uint64_t config_hash,
                 bool single_precision = false);
struct LoadedTensor {
  ChannelTensor tensor;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};
LoadedTensor load_tensor(const std::string& path);

}  // namespace cfmimo
