// SPDX-License-Identifier: Apache-2.0
//
// Centralized LMMSE equalization, per-UE SINR, QPSK mapping, and the
// end-to-end transmit/detect step.
#pragma once

#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/codebook.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

// Per-subcarrier compound channel G^v = H^v P, each N_R x K.
struct EffectiveChannel {
  std::vector<Mat> per_subcarrier;
};

// Per-subcarrier LMMSE matrix W^v, each N_R x K; soft estimates are W^H y.
struct EqualizerBank {
  std::vector<Mat> per_subcarrier;
};

EffectiveChannel effective_channel(const ChannelTensor& tensor,
                                   const BeamAssignment& assignment);

// W = G (G^H G + (N0/Es) I_K)^{-1}, via a Hermitian solve of the Gram
// system.  Throws SingularGram when N0 = 0 and G is column-rank deficient.
Mat lmmse(const Mat& g, double n0, double es);
EqualizerBank lmmse_bank(const EffectiveChannel& g, double n0, double es);

// Post-equalization SINR of UE k (0-based):
//   Es|w_k^H g_k|^2 / (Es sum_{k'!=k} |w_k^H g_{k'}|^2 + N0 ||w_k||^2).
// Symbols carry energy Es, so it scales both signal and interference.
double sinr(int k, const Mat& g, const Mat& w, double n0, double es);

// QPSK with per-symbol energy Es: {(+-1 +- j) * sqrt(Es/2)}.
Mat draw_qpsk(int rows, int cols, double es, RngStream& rng);
Mat qpsk_hard_decision(const Mat& soft, double es);

struct DetectionResult {
  std::vector<Mat> soft;  // K x T_D per subcarrier
  std::vector<Mat> hard;
};

// y = G s + n per subcarrier and slot; soft = W^H y; hard = nearest QPSK
// point with energy es.  Noise matrices are pre-drawn (N_R x T_D, entry
// variance N0) so callers control stream assignment.
DetectionResult transmit_detect(const EffectiveChannel& g, const EqualizerBank& w,
                                const std::vector<Mat>& payload,
                                const std::vector<Mat>& noise, double es);
// Convenience overload drawing noise from one stream, subcarriers in order.
DetectionResult transmit_detect(const EffectiveChannel& g, const EqualizerBank& w,
                                const std::vector<Mat>& payload, double n0,
                                double es, RngStream& rng);

}  // namespace cfmimo
