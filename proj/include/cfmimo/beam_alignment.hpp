// SPDX-License-Identifier: Apache-2.0
//
// Beam-selection strategies over the frequency-flat surrogate: per-UE SNR
// maximizers (digital and codebook-constrained), the interference-aware
// two-pass greedy, the tiny-instance exhaustive max-min oracle, and the
// single-antenna baseline.
#pragma once

#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/codebook.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

// p_k = leading right-singular vector of the UE's surrogate block stack,
// phase-normalized so the first entry is real nonnegative.
BeamAssignment digital_iu(const SurrogateMatrix& surrogate);

// b_k = argmax_b ||Hbar_k p_b||^2, independently per UE; ties take the
// lowest beam index.
BeamAssignment analog_iu(const SurrogateMatrix& surrogate,
                         const BeamCodebook& codebook);

struct FixedBeam {
  int ue;    // 0-based
  Vec beam;
};

// SINR of UE `ue` using beam `candidate` when only the UEs in `fixed` (which
// must not include `ue`) interfere: the restricted compound channel gets its
// own LMMSE equalizer and the standard SINR is read off `ue`'s column.
// With `fixed` empty this is the single-UE SNR Es||Hbar_k p||^2 / N0.
double sinr_partial(const SurrogateMatrix& surrogate, int ue, const Vec& candidate,
                    const std::vector<FixedBeam>& fixed, double n0, double es);

struct BaTraceEntry {
  int pass = 0;                 // 1 or 2
  int ue = 0;                   // 0-based
  int chosen_beam = 0;          // 1-based codebook index
  double objective = 0.0;       // SINR of the chosen beam
  double incumbent_objective = 0.0;  // pass 2: previous beam's SINR; NaN in pass 1
};

struct IaResult {
  BeamAssignment assignment;
  std::vector<int> order;  // pass-1 UE visit order (0-based)
  std::vector<BaTraceEntry> trace;
};

// Two-pass interference-aware greedy.  Pass 1 visits UEs by descending
// sigma_max of their surrogate blocks (ties by UE index) and picks each beam
// against only the already-fixed UEs.  Pass 2 walks the same order reversed
// exactly once, re-picking each beam against all other (current) beams.
IaResult analog_ia(const SurrogateMatrix& surrogate, const BeamCodebook& codebook,
                   double n0, double es);

// Full-interference SINR of one UE under a complete assignment.
double full_sinr(const SurrogateMatrix& surrogate,
                 const std::vector<Vec>& beams, int ue, double n0, double es);
// min_k of the above; the exhaustive oracle's objective.
double min_full_sinr(const SurrogateMatrix& surrogate,
                     const std::vector<Vec>& beams, double n0, double es);

// Brute-force max-min assignment over the full B^K lattice.  Guarded by
// max_combinations (throws CombinatorialBudgetExceeded); test oracle only.
BeamAssignment exhaustive_maxmin(const SurrogateMatrix& surrogate,
                                 const BeamCodebook& codebook, double n0,
                                 double es, std::uint64_t max_combinations);

// No-BA baseline: every UE transmits from its first antenna (p_k = e_1);
// meant for the tensor sliced down to one antenna per UE.
BeamAssignment single_antenna_baseline(int num_ues, int ue_antennas = 1);

}  // namespace cfmimo
