// SPDX-License-Identifier: Apache-2.0
//
// Analog beam codebook on the uniform cosine-angle grid and the per-UE beam
// assignment record produced by every selection strategy.
#pragma once

#include <string>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

struct BeamCodebook {
  int ue_antennas = 0;
  std::vector<Vec> beams;     // B unit-norm vectors of length n_UE
  std::vector<double> angles;  // grid angles, angles[b] = b*pi/B
};

// Beam b (1-based) points at phi_b = (b-1)*pi/B with entries
// exp(-j*pi*cos(phi_b)*m)/sqrt(n_UE).
BeamCodebook build_codebook(int ue_antennas, int num_beams);

enum class BaMethod {
  single_antenna,
  digital_iu,
  analog_iu,
  analog_ia,
  exhaustive,
};

std::string method_name(BaMethod m);
BaMethod parse_method(const std::string& name);  // throws ConfigError

struct BeamAssignment {
  BaMethod method = BaMethod::analog_iu;
  int ue_antennas = 0;
  std::vector<int> beam_index;  // 1-based codebook index per UE, 0 = explicit vector
  std::vector<Vec> vectors;     // resolved unit-norm beam per UE (always filled)

  int num_ues() const { return static_cast<int>(vectors.size()); }
  // Block-diagonal N_T x K precoder P = diag(p_1, ..., p_K).
  Mat materialize() const;
};

// Helpers shared by the selection strategies.
BeamAssignment make_indexed_assignment(BaMethod method, const BeamCodebook& cb,
                                       const std::vector<int>& indices_1based);

// Small text record for shipping assignments over a control channel or into
// files ("# cfmimo-beams v1" header).  Parsed indexed entries carry empty
// vectors until resolved against a codebook.
std::string serialize_assignment(const BeamAssignment& a);
BeamAssignment parse_assignment(const std::string& text);  // throws IoError
void resolve_assignment(BeamAssignment& a, const BeamCodebook& cb);

}  // namespace cfmimo
