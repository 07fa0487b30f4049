// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfmimo {

Vec steering_vector(double angle_rad, int n) {
  Vec a(n);
  const double c = std::cos(angle_rad);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int m = 0; m < n; ++m) {
    a(m) = std::polar(norm, -kPi * c * m);
  }
  return a;
}

PathSet generate_paths(const Geometry& geom, const SystemConfig& cfg,
                       const ChannelModelParams& params, RngStream& rng) {
  PathSet ps;
  ps.dims = cfg.dims();
  ps.links.resize(static_cast<std::size_t>(cfg.num_aps) * cfg.num_ues);

  const double lambda = kSpeedOfLight / cfg.carrier_freq_hz;
  const double spread_rad = params.angular_spread_deg * kPi / 180.0;

  for (int l = 0; l < cfg.num_aps; ++l) {
    for (int k = 0; k < cfg.num_ues; ++k) {
      auto& link = ps.link(l, k);
      const Eigen::Vector3d d3 = geom.ue_positions[k] - geom.ap_positions[l];
      const double dist = d3.norm();
      const double bearing = std::atan2(d3.y(), d3.x());
      const double aoa0 = bearing - geom.ap_orientations[l];
      const double aod0 = (bearing + kPi) - geom.ue_orientations[k];
      const double fs_amp = lambda / (4.0 * kPi * dist);  // free-space amplitude
      const double base_delay = dist / kSpeedOfLight;

      // Fixed draw order per link keeps the stream reproducible.
      const double shadow_db = params.shadowing_sigma_db * rng.gaussian();
      const double shadow_amp = std::pow(10.0, shadow_db / 20.0);

      const bool has_los =
          params.los_decay_distance_m <= 0.0 ||
          rng.uniform() < std::exp(-dist / params.los_decay_distance_m);
      if (has_los) {
        Path p;
        p.gain = std::polar(fs_amp * shadow_amp, 2.0 * kPi * rng.uniform());
        p.delay_s = base_delay;
        p.aoa_rad = aoa0;
        p.aod_rad = aod0;
        link.push_back(p);
      }

      const int n_clusters = rng.poisson(params.mean_nlos_clusters);
      for (int c = 0; c < n_clusters; ++c) {
        const double extra_db = params.nlos_extra_loss_db +
                                params.nlos_extra_loss_spread_db * rng.gaussian();
        const double amp = fs_amp * shadow_amp * std::pow(10.0, -extra_db / 20.0);
        Path p;
        p.gain = std::polar(amp, 2.0 * kPi * rng.uniform());
        p.delay_s =
            base_delay + rng.exponential(params.excess_delay_scale_ns * 1e-9);
        p.aoa_rad = aoa0 + spread_rad * rng.gaussian();
        p.aod_rad = aod0 + spread_rad * rng.gaussian();
        link.push_back(p);
      }
    }
  }

  // Re-reference delays to the earliest arrival so absolute distances do not
  // eat into the symbol duration budget.
  double min_delay = std::numeric_limits<double>::infinity();
  for (const auto& link : ps.links)
    for (const auto& p : link) min_delay = std::min(min_delay, p.delay_s);
  if (std::isfinite(min_delay)) {
    for (auto& link : ps.links)
      for (auto& p : link) p.delay_s -= min_delay;
  }
  return ps;
}

ChannelTensor paths_to_tensor(const PathSet& paths, const SystemConfig& cfg) {
  const Dims dims = paths.dims;
  const int n_sc = cfg.num_subcarriers;
  const double symbol_s = cfg.symbol_duration_s();
  for (const auto& link : paths.links) {
    for (const auto& p : link) {
      if (p.delay_s >= symbol_s) {
        throw DelayTooLarge("path delay " + std::to_string(p.delay_s * 1e9) +
                            " ns reaches the OFDM symbol duration " +
                            std::to_string(symbol_s * 1e9) + " ns");
      }
    }
  }

  // Per-path outer products are subcarrier-independent; build them once.
  struct Flat {
    int ap, ue;
    cplx gain;
    double delay_s;
    Mat outer;  // sqrt(n_AP*n_UE) * a_AP a_UE^H
  };
  std::vector<Flat> flat;
  const double array_scale =
      std::sqrt(static_cast<double>(dims.ap_antennas) * dims.ue_antennas);
  for (int l = 0; l < dims.num_aps; ++l) {
    for (int k = 0; k < dims.num_ues; ++k) {
      for (const auto& p : paths.link(l, k)) {
        Flat f;
        f.ap = l;
        f.ue = k;
        f.gain = p.gain;
        f.delay_s = p.delay_s;
        f.outer = array_scale * steering_vector(p.aoa_rad, dims.ap_antennas) *
                  steering_vector(p.aod_rad, dims.ue_antennas).adjoint();
        flat.push_back(std::move(f));
      }
    }
  }

  ChannelTensor t;
  t.dims = dims;
  t.num_subcarriers = n_sc;
  t.per_subcarrier.assign(n_sc, Mat::Zero(dims.rx(), dims.tx()));
  const double delta_f = cfg.subcarrier_spacing_hz();

#pragma omp parallel for schedule(static)
  for (int v = 0; v < n_sc; ++v) {
    Mat& h = t.per_subcarrier[v];
    const double f_v = v * delta_f;
    for (const auto& f : flat) {
      const cplx w = f.gain * std::polar(1.0, -2.0 * kPi * f_v * f.delay_s);
      h.block(f.ap * dims.ap_antennas, f.ue * dims.ue_antennas,
              dims.ap_antennas, dims.ue_antennas) += w * f.outer;
    }
  }
  return t;
}

ChannelTensor slice_first_ue_antenna(const ChannelTensor& tensor) {
  ChannelTensor out;
  out.dims = tensor.dims;
  out.dims.ue_antennas = 1;
  out.num_subcarriers = tensor.num_subcarriers;
  out.per_subcarrier.resize(tensor.num_subcarriers);
  for (int v = 0; v < tensor.num_subcarriers; ++v) {
    Mat h(out.dims.rx(), out.dims.tx());
    for (int k = 0; k < tensor.dims.num_ues; ++k) {
      h.col(k) = tensor.per_subcarrier[v].col(k * tensor.dims.ue_antennas);
    }
    out.per_subcarrier[v] = std::move(h);
  }
  return out;
}

SurrogateMatrix extract_surrogate(const ChannelTensor& tensor,
                                  const std::vector<int>& sampled) {
  const Dims dims = tensor.dims;
  SurrogateMatrix s;
  s.dims = dims;
  s.h = Mat::Zero(dims.rx(), dims.tx());
  s.chosen_subcarrier.assign(static_cast<std::size_t>(dims.num_aps) * dims.num_ues, 0);

  for (int l = 0; l < dims.num_aps; ++l) {
    for (int k = 0; k < dims.num_ues; ++k) {
      double best = -1.0;
      int best_v = 0;
      for (int v1 : sampled) {
        const double norm2 = tensor.block(v1 - 1, l, k).squaredNorm();
        if (norm2 > best || (norm2 == best && v1 < best_v)) {
          best = norm2;
          best_v = v1;
        }
      }
      s.h.block(l * dims.ap_antennas, k * dims.ue_antennas, dims.ap_antennas,
                dims.ue_antennas) = tensor.block(best_v - 1, l, k);
      s.chosen_subcarrier[l * dims.num_ues + k] = best_v;
    }
  }
  return s;
}

}  // namespace cfmimo
