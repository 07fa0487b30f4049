// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/reference.hpp"

#include <cmath>

namespace cfmimo::reference {

ChannelTensor paths_to_tensor(const PathSet& paths, const SystemConfig& cfg) {
  const Dims dims = paths.dims;
  const int n_sc = cfg.num_subcarriers;
  const double symbol_s = cfg.symbol_duration_s();
  const double delta_f = cfg.subcarrier_spacing_hz();

  ChannelTensor t;
  t.dims = dims;
  t.num_subcarriers = n_sc;
  t.per_subcarrier.assign(n_sc, Mat::Zero(dims.rx(), dims.tx()));

  for (int l = 0; l < dims.num_aps; ++l) {
    for (int k = 0; k < dims.num_ues; ++k) {
      for (const Path& p : paths.link(l, k)) {
        if (p.delay_s >= symbol_s) {
          throw DelayTooLarge("path delay reaches the OFDM symbol duration");
        }
        const double cos_aoa = std::cos(p.aoa_rad);
        const double cos_aod = std::cos(p.aod_rad);
        const double amp = std::abs(p.gain);
        const double phase0 = std::arg(p.gain);
        for (int v = 0; v < n_sc; ++v) {
          const double phase_f = -2.0 * kPi * (v * delta_f) * p.delay_s;
          Mat& h = t.per_subcarrier[v];
          for (int m = 0; m < dims.ap_antennas; ++m) {
            for (int n = 0; n < dims.ue_antennas; ++n) {
              // steering scales cancel against the sqrt(n_AP*n_UE) factor
              h(l * dims.ap_antennas + m, k * dims.ue_antennas + n) +=
                  std::polar(amp, phase0 + phase_f - kPi * cos_aoa * m +
                                      kPi * cos_aod * n);
            }
          }
        }
      }
    }
  }
  return t;
}

Mat lmmse(const Mat& g, double n0, double es) {
  const Eigen::Index k_total = g.cols();
  Mat gram = g.adjoint() * g;
  if (n0 <= 0.0) {
    const Eigen::ColPivHouseholderQR<Mat> qr(g);
    if (qr.rank() < k_total) {
      throw SingularGram("zero-noise LMMSE needs full column rank");
    }
  }
  gram.diagonal().array() += cplx(n0 / es, 0.0);
  return g * gram.inverse();
}

EqualizerBank lmmse_bank(const EffectiveChannel& g, double n0, double es) {
  EqualizerBank w;
  w.per_subcarrier.reserve(g.per_subcarrier.size());
  for (const Mat& gv : g.per_subcarrier) w.per_subcarrier.push_back(lmmse(gv, n0, es));
  return w;
}

EffectiveChannel effective_channel(const ChannelTensor& tensor,
                                   const BeamAssignment& assignment) {
  const Dims dims = tensor.dims;
  EffectiveChannel g;
  g.per_subcarrier.assign(tensor.num_subcarriers,
                          Mat::Zero(dims.rx(), dims.num_ues));
  for (int v = 0; v < tensor.num_subcarriers; ++v) {
    const Mat& h = tensor.per_subcarrier[v];
    Mat& gv = g.per_subcarrier[v];
    for (int k = 0; k < dims.num_ues; ++k) {
      for (int r = 0; r < dims.rx(); ++r) {
        cplx acc = 0.0;
        for (int n = 0; n < dims.ue_antennas; ++n) {
          acc += h(r, k * dims.ue_antennas + n) * assignment.vectors[k](n);
        }
        gv(r, k) = acc;
      }
    }
  }
  return g;
}

DetectionResult transmit_detect(const EffectiveChannel& g, const EqualizerBank& w,
                                const std::vector<Mat>& payload,
                                const std::vector<Mat>& noise, double es) {
  const int n_sc = static_cast<int>(g.per_subcarrier.size());
  DetectionResult out;
  out.soft.resize(n_sc);
  out.hard.resize(n_sc);
  for (int v = 0; v < n_sc; ++v) {
    const Mat& gv = g.per_subcarrier[v];
    const Mat& wv = w.per_subcarrier[v];
    const Eigen::Index n_rx = gv.rows();
    const Eigen::Index K = gv.cols();
    const Eigen::Index T = payload[v].cols();
    Mat y(n_rx, T);
    for (Eigen::Index t = 0; t < T; ++t) {
      for (Eigen::Index r = 0; r < n_rx; ++r) {
        cplx acc = noise[v](r, t);
        for (Eigen::Index k = 0; k < K; ++k) acc += gv(r, k) * payload[v](k, t);
        y(r, t) = acc;
      }
    }
    Mat soft(K, T);
    for (Eigen::Index t = 0; t < T; ++t) {
      for (Eigen::Index k = 0; k < K; ++k) {
        cplx acc = 0.0;
        for (Eigen::Index r = 0; r < n_rx; ++r) {
          acc += std::conj(wv(r, k)) * y(r, t);
        }
        soft(k, t) = acc;
      }
    }
    out.soft[v] = std::move(soft);
    out.hard[v] = qpsk_hard_decision(out.soft[v], es);
  }
  return out;
}

}  // namespace cfmimo::reference
