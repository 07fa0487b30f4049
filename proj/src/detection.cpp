// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/detection.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace cfmimo {

EffectiveChannel effective_channel(const ChannelTensor& tensor,
                                   const BeamAssignment& assignment) {
  const Dims dims = tensor.dims;
  if (assignment.num_ues() != dims.num_ues ||
      assignment.ue_antennas != dims.ue_antennas) {
    throw ConfigError("beam assignment does not match tensor dimensions");
  }
  EffectiveChannel g;
  g.per_subcarrier.assign(tensor.num_subcarriers, Mat(dims.rx(), dims.num_ues));
#pragma omp parallel for schedule(static)
  for (int v = 0; v < tensor.num_subcarriers; ++v) {
    const Mat& h = tensor.per_subcarrier[v];
    Mat& gv = g.per_subcarrier[v];
    for (int k = 0; k < dims.num_ues; ++k) {
      gv.col(k) = h.middleCols(k * dims.ue_antennas, dims.ue_antennas) *
                  assignment.vectors[k];
    }
  }
  return g;
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
  // W^H = (G^H G + (N0/Es) I)^{-1} G^H via a Hermitian solve.
  return gram.ldlt().solve(g.adjoint()).adjoint();
}

EqualizerBank lmmse_bank(const EffectiveChannel& g, double n0, double es) {
  EqualizerBank w;
  w.per_subcarrier.resize(g.per_subcarrier.size());
#pragma omp parallel for schedule(static)
  for (int v = 0; v < static_cast<int>(g.per_subcarrier.size()); ++v) {
    w.per_subcarrier[v] = lmmse(g.per_subcarrier[v], n0, es);
  }
  return w;
}

double sinr(int k, const Mat& g, const Mat& w, double n0, double es) {
  const Vec wk = w.col(k);
  const Vec cross = g.adjoint() * wk;  // entry k' = g_{k'}^H w_k
  const double signal = es * std::norm(cross(k));
  double interference = 0.0;
  for (Eigen::Index j = 0; j < cross.size(); ++j) {
    if (j != k) interference += es * std::norm(cross(j));
  }
  const double denom = interference + n0 * wk.squaredNorm();
  if (denom <= 0.0) return 0.0;
  return signal / denom;
}

Mat draw_qpsk(int rows, int cols, double es, RngStream& rng) {
  const double a = std::sqrt(es / 2.0);
  Mat s(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto bits = rng.uniform_int(4);
      s(r, c) = cplx(bits & 1 ? a : -a, bits & 2 ? a : -a);
    }
  }
  return s;
}

Mat qpsk_hard_decision(const Mat& soft, double es) {
  const double a = std::sqrt(es / 2.0);
  Mat hard(soft.rows(), soft.cols());
  for (Eigen::Index r = 0; r < soft.rows(); ++r) {
    for (Eigen::Index c = 0; c < soft.cols(); ++c) {
      hard(r, c) = cplx(soft(r, c).real() >= 0.0 ? a : -a,
                        soft(r, c).imag() >= 0.0 ? a : -a);
    }
  }
  return hard;
}

DetectionResult transmit_detect(const EffectiveChannel& g, const EqualizerBank& w,
                                const std::vector<Mat>& payload,
                                const std::vector<Mat>& noise, double es) {
  const int n_sc = static_cast<int>(g.per_subcarrier.size());
  DetectionResult out;
  out.soft.resize(n_sc);
  out.hard.resize(n_sc);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < n_sc; ++v) {
    const Mat y = g.per_subcarrier[v] * payload[v] + noise[v];
    out.soft[v] = w.per_subcarrier[v].adjoint() * y;
    out.hard[v] = qpsk_hard_decision(out.soft[v], es);
  }
  return out;
}

DetectionResult transmit_detect(const EffectiveChannel& g, const EqualizerBank& w,
                                const std::vector<Mat>& payload, double n0,
                                double es, RngStream& rng) {
  std::vector<Mat> noise(g.per_subcarrier.size());
  for (std::size_t v = 0; v < g.per_subcarrier.size(); ++v) {
    const Eigen::Index rows = g.per_subcarrier[v].rows();
    const Eigen::Index cols = payload[v].cols();
    Mat n(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) n(r, c) = rng.cgaussian(n0);
    }
    noise[v] = std::move(n);
  }
  return transmit_detect(g, w, payload, noise, es);
}

}  // namespace cfmimo
