// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/beam_alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

#include "cfmimo/detection.hpp"

namespace cfmimo {

namespace {

// Rotate so the first nonzero entry is real positive; zero entries ahead of
// it stay zero, so the first entry ends up real nonnegative either way.
void normalize_phase(Vec& v) {
  for (Eigen::Index m = 0; m < v.size(); ++m) {
    const double mag = std::abs(v(m));
    if (mag > 0.0) {
      v *= std::conj(v(m)) / mag;
      return;
    }
  }
}

}  // namespace

BeamAssignment digital_iu(const SurrogateMatrix& surrogate) {
  const int K = surrogate.dims.num_ues;
  BeamAssignment a;
  a.method = BaMethod::digital_iu;
  a.ue_antennas = surrogate.dims.ue_antennas;
  a.beam_index.assign(K, 0);
  a.vectors.resize(K);
  for (int k = 0; k < K; ++k) {
    const Mat hk = surrogate.ue_columns(k);
    if (hk.squaredNorm() == 0.0) {
      throw DegenerateChannel("UE " + std::to_string(k + 1) +
                              " has a zero surrogate block");
    }
    Eigen::JacobiSVD<Mat> svd(hk, Eigen::ComputeThinV);
    Vec p = svd.matrixV().col(0);
    normalize_phase(p);
    a.vectors[k] = p;
  }
  return a;
}

BeamAssignment analog_iu(const SurrogateMatrix& surrogate,
                         const BeamCodebook& codebook) {
  const int K = surrogate.dims.num_ues;
  const int B = static_cast<int>(codebook.beams.size());
  std::vector<int> best(K, 1);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < K; ++k) {
    const Mat hk = surrogate.ue_columns(k);
    double best_gain = -1.0;
    for (int b = 0; b < B; ++b) {
      const double gain = (hk * codebook.beams[b]).squaredNorm();
      if (gain > best_gain) {
        best_gain = gain;
        best[k] = b + 1;
      }
    }
  }
  BeamAssignment a = make_indexed_assignment(BaMethod::analog_iu, codebook, best);
  return a;
}

double sinr_partial(const SurrogateMatrix& surrogate, int ue, const Vec& candidate,
                    const std::vector<FixedBeam>& fixed, double n0, double es) {
  const Eigen::Index n_rx = surrogate.h.rows();
  const int n_cols = static_cast<int>(fixed.size()) + 1;
  Mat g(n_rx, n_cols);
  for (int j = 0; j < n_cols - 1; ++j) {
    g.col(j) = surrogate.ue_columns(fixed[j].ue) * fixed[j].beam;
  }
  g.col(n_cols - 1) = surrogate.ue_columns(ue) * candidate;
  const Mat w = lmmse(g, n0, es);
  return sinr(n_cols - 1, g, w, n0, es);
}

double full_sinr(const SurrogateMatrix& surrogate, const std::vector<Vec>& beams,
                 int ue, double n0, double es) {
  const int K = surrogate.dims.num_ues;
  Mat g(surrogate.h.rows(), K);
  for (int k = 0; k < K; ++k) g.col(k) = surrogate.ue_columns(k) * beams[k];
  const Mat w = lmmse(g, n0, es);
  return sinr(ue, g, w, n0, es);
}

double min_full_sinr(const SurrogateMatrix& surrogate,
                     const std::vector<Vec>& beams, double n0, double es) {
  const int K = surrogate.dims.num_ues;
  Mat g(surrogate.h.rows(), K);
  for (int k = 0; k < K; ++k) g.col(k) = surrogate.ue_columns(k) * beams[k];
  const Mat w = lmmse(g, n0, es);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) worst = std::min(worst, sinr(k, g, w, n0, es));
  return worst;
}

IaResult analog_ia(const SurrogateMatrix& surrogate, const BeamCodebook& codebook,
                   double n0, double es) {
  const int K = surrogate.dims.num_ues;
  const int B = static_cast<int>(codebook.beams.size());

  std::vector<double> sigma(K);
  for (int k = 0; k < K; ++k) {
    Eigen::JacobiSVD<Mat> svd(surrogate.ue_columns(k));
    sigma[k] = svd.singularValues()(0);
  }
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return sigma[a] > sigma[b]; });

  IaResult res;
  res.order = order;
  std::vector<int> chosen_idx(K, 0);
  std::vector<Vec> chosen(K);

  // Pass 1: strongest UE first, interference only from already-fixed beams.
  std::vector<FixedBeam> fixed;
  for (int ue : order) {
    std::vector<double> vals(B);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < B; ++b) {
      vals[b] = sinr_partial(surrogate, ue, codebook.beams[b], fixed, n0, es);
    }
    int best_b = 0;
    for (int b = 1; b < B; ++b) {
      if (vals[b] > vals[best_b]) best_b = b;
    }
    chosen_idx[ue] = best_b + 1;
    chosen[ue] = codebook.beams[best_b];
    fixed.push_back({ue, chosen[ue]});
    res.trace.push_back({1, ue, best_b + 1, vals[best_b],
                         std::numeric_limits<double>::quiet_NaN()});
  }

  // Pass 2: reverse order, one sweep, full interference from current beams.
  for (int pos = K - 1; pos >= 0; --pos) {
    const int ue = order[pos];
    std::vector<FixedBeam> others;
    others.reserve(K - 1);
    for (int j = 0; j < K; ++j) {
      if (j != ue) others.push_back({j, chosen[j]});
    }
    std::vector<double> vals(B);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < B; ++b) {
      vals[b] = sinr_partial(surrogate, ue, codebook.beams[b], others, n0, es);
    }
    const double incumbent = vals[chosen_idx[ue] - 1];
    int best_b = 0;
    for (int b = 1; b < B; ++b) {
      if (vals[b] > vals[best_b]) best_b = b;
    }
    chosen_idx[ue] = best_b + 1;
    chosen[ue] = codebook.beams[best_b];
    res.trace.push_back({2, ue, best_b + 1, vals[best_b], incumbent});
  }

  res.assignment = make_indexed_assignment(BaMethod::analog_ia, codebook, chosen_idx);
  return res;
}

BeamAssignment exhaustive_maxmin(const SurrogateMatrix& surrogate,
                                 const BeamCodebook& codebook, double n0,
                                 double es, std::uint64_t max_combinations) {
  const int K = surrogate.dims.num_ues;
  const int B = static_cast<int>(codebook.beams.size());
  std::uint64_t total = 1;
  for (int k = 0; k < K; ++k) {
    if (total > max_combinations / static_cast<std::uint64_t>(B)) {
      throw CombinatorialBudgetExceeded(
          "B^K exceeds max_combinations = " + std::to_string(max_combinations));
    }
    total *= static_cast<std::uint64_t>(B);
  }
  if (total > max_combinations) {
    throw CombinatorialBudgetExceeded(
        "B^K exceeds max_combinations = " + std::to_string(max_combinations));
  }

  std::vector<int> digits(K, 0), best_digits(K, 0);
  std::vector<Vec> beams(K);
  double best_obj = -1.0;
  for (std::uint64_t it = 0; it < total; ++it) {
    for (int k = 0; k < K; ++k) beams[k] = codebook.beams[digits[k]];
    const double obj = min_full_sinr(surrogate, beams, n0, es);
    if (obj > best_obj) {
      best_obj = obj;
      best_digits = digits;
    }
    for (int k = K - 1; k >= 0; --k) {  // lexicographic increment
      if (++digits[k] < B) break;
      digits[k] = 0;
    }
  }

  std::vector<int> idx(K);
  for (int k = 0; k < K; ++k) idx[k] = best_digits[k] + 1;
  return make_indexed_assignment(BaMethod::exhaustive, codebook, idx);
}

BeamAssignment single_antenna_baseline(int num_ues, int ue_antennas) {
  BeamAssignment a;
  a.method = BaMethod::single_antenna;
  a.ue_antennas = ue_antennas;
  a.beam_index.assign(num_ues, 0);
  Vec e1 = Vec::Zero(ue_antennas);
  e1(0) = 1.0;
  a.vectors.assign(num_ues, e1);
  return a;
}

}  // namespace cfmimo
