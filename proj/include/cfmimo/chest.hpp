// SPDX-License-Identifier: Apache-2.0
//
// Two-stage channel estimation: group-sparse recovery from beam-swept
// pilots (forward-backward splitting) before beam alignment, and exact
// least squares from Hadamard pilots afterwards.
#pragma once

#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/codebook.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/detection.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

// Sylvester construction; order must be a power of two (>= 1).
Eigen::MatrixXd hadamard_matrix(int order);
int next_pow2(int n);

// N_T x (B*C) pilot matrix: cluster c sweeps the whole codebook in slots
// [cB, (c+1)B); all UE pilot symbols equal 1, so each active UE contributes
// one unit-norm beam column per slot.
struct BeamPilotMatrix {
  Mat b_mat;
  int num_beams = 0;
  int num_clusters = 0;
  std::vector<int> cluster_of_ue;             // 0-based
  std::vector<std::vector<int>> sweep_order;  // per UE: beam swept in each slot

  int pilot_slots() const { return static_cast<int>(b_mat.cols()); }
};

// Random equisized clustering; each UE sweeps the codebook in its own random
// order so same-cluster UEs stay distinguishable.  Throws
// ClusterSizeMismatch when C does not divide K.
BeamPilotMatrix build_beam_pilots(const BeamCodebook& codebook, int num_ues,
                                  int num_clusters, RngStream& rng);

// M * max(0, 1 - t/||M||_F); the prox of t*||.||_F.
Mat block_soft_threshold(const Mat& m, double t);

struct FbsOptions {
  double mu = 0.0;
  double tol = 1e-6;
  int max_iter = 500;
};

struct FbsResult {
  Mat h;                               // N_R x N_T estimate
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // one entry per iteration
  double objective() const {
    return objective_trace.empty() ? 0.0 : objective_trace.back();
  }
};

// argmin_H 0.5*||Y - HB||_F^2 + mu*sum_blocks ||H_{l,k}||_F by proximal
// gradient with fixed step 0.99/sigma_max(B)^2, zero start.  Non-convergence
// is reported through the flag, not thrown.
FbsResult fbs_group_lasso(const Mat& y, const Mat& b_mat, const Dims& dims,
                          const FbsOptions& opts);

struct ChannelEstimate {
  Dims dims;
  std::vector<int> sampled;        // 1-based subcarrier indices
  std::vector<Mat> h_hat;          // one estimate per sampled subcarrier
  std::vector<int> iterations;
  std::vector<bool> converged;
  std::vector<std::vector<double>> objective_traces;

  // Support diagnostics: per sampled subcarrier, ||Hhat_{l,k}||_F indexed
  // ap * num_ues + ue.
  std::vector<std::vector<double>> block_norms() const;
};

// Default regularizer mu = alpha * sqrt(N0 * n_AP * B): noise std scaled by
// the per-block pilot dimension.
double default_mu(double mu_alpha, double n0, int ap_antennas, int num_beams);

// Simulates Y = H^v B + N per sampled subcarrier and solves the group lasso
// for each.  Noise matrices are N_R x pilot_slots with entry variance N0.
ChannelEstimate pre_ba_chest(const ChannelTensor& tensor,
                             const BeamPilotMatrix& pilots,
                             const std::vector<int>& sampled,
                             const FbsOptions& opts,
                             const std::vector<Mat>& noise);
ChannelEstimate pre_ba_chest(const ChannelTensor& tensor,
                             const BeamPilotMatrix& pilots,
                             const std::vector<int>& sampled,
                             const FbsOptions& opts, double n0, RngStream& rng);

// Strongest sampled block per (ap, ue) from the estimates, same rule as the
// genie surrogate.
SurrogateMatrix extract_surrogate(const ChannelEstimate& estimate);

// Hadamard pilot LS: UEs send the first K rows of a +-1 Hadamard matrix of
// order n_p = next_pow2(K), scaled to symbol energy Es; Ghat = Y S^H/(n_p Es)
// is exact LS with per-entry error variance N0/(n_p Es).  Noise matrices are
// N_R x n_p with entry variance N0.
EffectiveChannel post_ba_chest(const EffectiveChannel& g, double es,
                               const std::vector<Mat>& noise);
EffectiveChannel post_ba_chest(const EffectiveChannel& g, double n0, double es,
                               RngStream& rng);

}  // namespace cfmimo
