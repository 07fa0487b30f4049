// SPDX-License-Identifier: Apache-2.0
//
// Serial reference implementations of the hot kernels, written along
// different arithmetic routes (entrywise phase accumulation, explicit
// inverses, hand-rolled matrix products).  They exist to cross-check the
// parallel kernels and to anchor the benchmarks; nothing in the pipeline
// calls them.
#pragma once

#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/codebook.hpp"
#include "cfmimo/detection.hpp"

namespace cfmimo::reference {

// Entry-by-entry phase accumulation instead of per-path outer products.
ChannelTensor paths_to_tensor(const PathSet& paths, const SystemConfig& cfg);

// Explicit Gram inverse instead of a factorized solve.
Mat lmmse(const Mat& g, double n0, double es);
EqualizerBank lmmse_bank(const EffectiveChannel& g, double n0, double es);

// Hand-rolled column products.
EffectiveChannel effective_channel(const ChannelTensor& tensor,
                                   const BeamAssignment& assignment);

// Scalar triple loops for y = Gs + n and the equalizer output.
DetectionResult transmit_detect(const EffectiveChannel& g, const EqualizerBank& w,
                                const std::vector<Mat>& payload,
                                const std::vector<Mat>& noise, double es);

}  // namespace cfmimo::reference
