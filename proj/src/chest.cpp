// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/chest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

namespace cfmimo {

Eigen::MatrixXd hadamard_matrix(int order) {
  if (order < 1 || (order & (order - 1)) != 0) {
    throw ConfigError("Hadamard order must be a power of two, got " +
                      std::to_string(order));
  }
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 1.0;
  while (h.rows() < order) {
    const Eigen::Index n = h.rows();
    Eigen::MatrixXd next(2 * n, 2 * n);
    next.topLeftCorner(n, n) = h;
    next.topRightCorner(n, n) = h;
    next.bottomLeftCorner(n, n) = h;
    next.bottomRightCorner(n, n) = -h;
    h = std::move(next);
  }
  return h;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

BeamPilotMatrix build_beam_pilots(const BeamCodebook& codebook, int num_ues,
                                  int num_clusters, RngStream& rng) {
  if (num_clusters < 1 || num_ues % num_clusters != 0) {
    throw ClusterSizeMismatch("cluster count " + std::to_string(num_clusters) +
                              " does not divide " + std::to_string(num_ues) +
                              " UEs");
  }
  const int B = static_cast<int>(codebook.beams.size());
  const int n_ue = codebook.ue_antennas;

  BeamPilotMatrix p;
  p.num_beams = B;
  p.num_clusters = num_clusters;

  std::vector<int> ues(num_ues);
  std::iota(ues.begin(), ues.end(), 0);
  rng.shuffle(ues);
  p.cluster_of_ue.assign(num_ues, 0);
  const int per_cluster = num_ues / num_clusters;
  for (int i = 0; i < num_ues; ++i) p.cluster_of_ue[ues[i]] = i / per_cluster;

  p.sweep_order.assign(num_ues, {});
  for (int k = 0; k < num_ues; ++k) {
    std::vector<int> sweep(B);
    std::iota(sweep.begin(), sweep.end(), 0);
    rng.shuffle(sweep);
    p.sweep_order[k] = std::move(sweep);
  }

  p.b_mat = Mat::Zero(static_cast<Eigen::Index>(num_ues) * n_ue,
                      static_cast<Eigen::Index>(B) * num_clusters);
  for (int k = 0; k < num_ues; ++k) {
    const int c = p.cluster_of_ue[k];
    for (int t = 0; t < B; ++t) {
      p.b_mat.block(k * n_ue, c * B + t, n_ue, 1) =
          codebook.beams[p.sweep_order[k][t]];
    }
  }
  return p;
}

Mat block_soft_threshold(const Mat& m, double t) {
  const double norm = m.norm();
  if (norm <= t) return Mat::Zero(m.rows(), m.cols());
  return m * (1.0 - t / norm);
}

namespace {

double group_norm(const Mat& h, const Dims& dims) {
  double s = 0.0;
  for (int l = 0; l < dims.num_aps; ++l) {
    for (int k = 0; k < dims.num_ues; ++k) {
      s += h.block(l * dims.ap_antennas, k * dims.ue_antennas, dims.ap_antennas,
                   dims.ue_antennas)
               .norm();
    }
  }
  return s;
}

}  // namespace

FbsResult fbs_group_lasso(const Mat& y, const Mat& b_mat, const Dims& dims,
                          const FbsOptions& opts) {
  if (y.cols() != b_mat.cols() || b_mat.rows() != dims.tx()) {
    throw ConfigError("group lasso: observation/pilot shapes disagree");
  }
  Eigen::JacobiSVD<Mat> svd(b_mat);
  const double sigma = svd.singularValues()(0);
  const double tau = 0.99 / (sigma * sigma);

  FbsResult res;
  res.h = Mat::Zero(dims.rx(), dims.tx());
  const Mat bh = b_mat.adjoint();

  for (int it = 0; it < opts.max_iter; ++it) {
    const Mat residual = y - res.h * b_mat;
    const Mat z = res.h + tau * residual * bh;
    Mat next(dims.rx(), dims.tx());
    for (int l = 0; l < dims.num_aps; ++l) {
      for (int k = 0; k < dims.num_ues; ++k) {
        next.block(l * dims.ap_antennas, k * dims.ue_antennas, dims.ap_antennas,
                   dims.ue_antennas) =
            block_soft_threshold(
                z.block(l * dims.ap_antennas, k * dims.ue_antennas,
                        dims.ap_antennas, dims.ue_antennas),
                tau * opts.mu);
      }
    }
    const double step = (next - res.h).norm();
    const double scale = std::max(res.h.norm(), 1e-300);
    res.h = std::move(next);
    res.iterations = it + 1;
    res.objective_trace.push_back(0.5 * (y - res.h * b_mat).squaredNorm() +
                                  opts.mu * group_norm(res.h, dims));
    if (step <= opts.tol * scale) {
      res.converged = true;
      break;
    }
  }
  return res;
}

std::vector<std::vector<double>> ChannelEstimate::block_norms() const {
  std::vector<std::vector<double>> out(h_hat.size());
  for (std::size_t i = 0; i < h_hat.size(); ++i) {
    out[i].resize(static_cast<std::size_t>(dims.num_aps) * dims.num_ues);
    for (int l = 0; l < dims.num_aps; ++l) {
      for (int k = 0; k < dims.num_ues; ++k) {
        out[i][l * dims.num_ues + k] =
            h_hat[i]
                .block(l * dims.ap_antennas, k * dims.ue_antennas,
                       dims.ap_antennas, dims.ue_antennas)
                .norm();
      }
    }
  }
  return out;
}

double default_mu(double mu_alpha, double n0, int ap_antennas, int num_beams) {
  return mu_alpha * std::sqrt(n0 * ap_antennas * num_beams);
}

ChannelEstimate pre_ba_chest(const ChannelTensor& tensor,
                             const BeamPilotMatrix& pilots,
                             const std::vector<int>& sampled,
                             const FbsOptions& opts,
                             const std::vector<Mat>& noise) {
  const int n_samples = static_cast<int>(sampled.size());
  ChannelEstimate est;
  est.dims = tensor.dims;
  est.sampled = sampled;
  est.h_hat.resize(n_samples);
  est.iterations.resize(n_samples);
  est.converged.assign(n_samples, false);
  est.objective_traces.resize(n_samples);

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_samples; ++i) {
    const Mat& h = tensor.per_subcarrier[sampled[i] - 1];
    const Mat y = h * pilots.b_mat + noise[i];
    FbsResult r = fbs_group_lasso(y, pilots.b_mat, tensor.dims, opts);
    est.h_hat[i] = std::move(r.h);
    est.iterations[i] = r.iterations;
    est.converged[i] = r.converged;
    est.objective_traces[i] = std::move(r.objective_trace);
  }
  return est;
}

ChannelEstimate pre_ba_chest(const ChannelTensor& tensor,
                             const BeamPilotMatrix& pilots,
                             const std::vector<int>& sampled,
                             const FbsOptions& opts, double n0, RngStream& rng) {
  std::vector<Mat> noise(sampled.size());
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    Mat n(tensor.dims.rx(), pilots.pilot_slots());
    for (Eigen::Index c = 0; c < n.cols(); ++c) {
      for (Eigen::Index r = 0; r < n.rows(); ++r) n(r, c) = rng.cgaussian(n0);
    }
    noise[i] = std::move(n);
  }
  return pre_ba_chest(tensor, pilots, sampled, opts, noise);
}

SurrogateMatrix extract_surrogate(const ChannelEstimate& estimate) {
  const Dims dims = estimate.dims;
  SurrogateMatrix s;
  s.dims = dims;
  s.h = Mat::Zero(dims.rx(), dims.tx());
  s.chosen_subcarrier.assign(static_cast<std::size_t>(dims.num_aps) * dims.num_ues,
                             0);
  for (int l = 0; l < dims.num_aps; ++l) {
    for (int k = 0; k < dims.num_ues; ++k) {
      double best = -1.0;
      int best_i = 0;
      for (int i = 0; i < static_cast<int>(estimate.sampled.size()); ++i) {
        const double norm2 =
            estimate.h_hat[i]
                .block(l * dims.ap_antennas, k * dims.ue_antennas,
                       dims.ap_antennas, dims.ue_antennas)
                .squaredNorm();
        const int v1 = estimate.sampled[i];
        if (norm2 > best ||
            (norm2 == best && v1 < estimate.sampled[best_i])) {
          best = norm2;
          best_i = i;
        }
      }
      s.h.block(l * dims.ap_antennas, k * dims.ue_antennas, dims.ap_antennas,
                dims.ue_antennas) =
          estimate.h_hat[best_i].block(l * dims.ap_antennas, k * dims.ue_antennas,
                                       dims.ap_antennas, dims.ue_antennas);
      s.chosen_subcarrier[l * dims.num_ues + k] = estimate.sampled[best_i];
    }
  }
  return s;
}

EffectiveChannel post_ba_chest(const EffectiveChannel& g, double es,
                               const std::vector<Mat>& noise) {
  const int n_sc = static_cast<int>(g.per_subcarrier.size());
  const int K = static_cast<int>(g.per_subcarrier.empty()
                                     ? 0
                                     : g.per_subcarrier[0].cols());
  const int n_p = next_pow2(K);
  const Eigen::MatrixXd had = hadamard_matrix(n_p);
  const Mat s_pilot =
      (std::sqrt(es) * had.topRows(K)).cast<cplx>();  // K x n_p, rows orthogonal

  EffectiveChannel out;
  out.per_subcarrier.resize(n_sc);
  const double inv = 1.0 / (n_p * es);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < n_sc; ++v) {
    const Mat y = g.per_subcarrier[v] * s_pilot + noise[v];
    out.per_subcarrier[v] = y * s_pilot.adjoint() * inv;
  }
  return out;
}

EffectiveChannel post_ba_chest(const EffectiveChannel& g, double n0, double es,
                               RngStream& rng) {
  const int K = static_cast<int>(g.per_subcarrier.empty()
                                     ? 0
                                     : g.per_subcarrier[0].cols());
  const int n_p = next_pow2(K);
  std::vector<Mat> noise(g.per_subcarrier.size());
  for (std::size_t v = 0; v < g.per_subcarrier.size(); ++v) {
    Mat n(g.per_subcarrier[v].rows(), n_p);
    for (Eigen::Index c = 0; c < n.cols(); ++c) {
      for (Eigen::Index r = 0; r < n.rows(); ++r) n(r, c) = rng.cgaussian(n0);
    }
    noise[v] = std::move(n);
  }
  return post_ba_chest(g, es, noise);
}

}  // namespace cfmimo
