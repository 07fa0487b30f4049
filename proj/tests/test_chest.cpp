// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>

#include "cfmimo/chest.hpp"

using namespace cfmimo;

namespace {

Mat random_matrix(int rows, int cols, RngStream& rng, double var = 1.0) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.cgaussian(var);
  return m;
}

Mat block_of(const Mat& h, const Dims& d, int l, int k) {
  return h.block(l * d.ap_antennas, k * d.ue_antennas, d.ap_antennas, d.ue_antennas);
}

}  // namespace

TEST_CASE("Hadamard matrices are orthogonal sign matrices") {
  for (int order : {1, 2, 4, 8, 16}) {
    const Eigen::MatrixXd h = hadamard_matrix(order);
    REQUIRE(h.rows() == order);
    REQUIRE(h.cols() == order);
    CHECK((h * h.transpose() -
           static_cast<double>(order) * Eigen::MatrixXd::Identity(order, order))
              .norm() == 0.0);
    CHECK((h.array().abs() - 1.0).matrix().norm() == 0.0);
  }
  CHECK_THROWS_AS(hadamard_matrix(3), ConfigError);
  CHECK_THROWS_AS(hadamard_matrix(0), ConfigError);
}

TEST_CASE("next power of two") {
  CHECK(next_pow2(1) == 1);
  CHECK(next_pow2(2) == 2);
  CHECK(next_pow2(3) == 4);
  CHECK(next_pow2(5) == 8);
  CHECK(next_pow2(8) == 8);
  CHECK(next_pow2(9) == 16);
}

TEST_CASE("beam pilot matrix structure") {
  const BeamCodebook cb = build_codebook(4, 8);
  RngStream rng(301, "cluster");
  const BeamPilotMatrix p = build_beam_pilots(cb, 8, 4, rng);

  CHECK(p.pilot_slots() == 32);  // B * C
  CHECK(p.b_mat.rows() == 32);   // K * n_UE
  REQUIRE(p.cluster_of_ue.size() == 8);

  // equisized clusters
  std::vector<int> count(4, 0);
  for (int c : p.cluster_of_ue) {
    REQUIRE(c >= 0);
    REQUIRE(c < 4);
    count[c]++;
  }
  for (int c = 0; c < 4; ++c) CHECK(count[c] == 2);

  // each UE block is nonzero exactly inside its cluster window and sweeps
  // the whole codebook once
  for (int k = 0; k < 8; ++k) {
    const int c = p.cluster_of_ue[k];
    std::set<int> swept;
    for (int t = 0; t < 32; ++t) {
      const Vec col = p.b_mat.block(k * 4, t, 4, 1);
      if (t >= c * 8 && t < (c + 1) * 8) {
        CHECK(col.norm() == doctest::Approx(1.0).epsilon(1e-12));
        const int b = p.sweep_order[k][t - c * 8];
        CHECK((col - cb.beams[b]).norm() == 0.0);
        swept.insert(b);
      } else {
        CHECK(col.norm() == 0.0);
      }
    }
    CHECK(swept.size() == 8);
  }

  // column energy in a window equals the number of active UEs there
  for (int t = 0; t < 32; ++t) {
    CHECK(p.b_mat.col(t).squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
  }

  // same-cluster UEs get different sweep orders (whp; fixed stream)
  for (int k1 = 0; k1 < 8; ++k1) {
    for (int k2 = k1 + 1; k2 < 8; ++k2) {
      if (p.cluster_of_ue[k1] == p.cluster_of_ue[k2]) {
        CHECK(p.sweep_order[k1] != p.sweep_order[k2]);
      }
    }
  }
}

TEST_CASE("degenerate pilot layouts") {
  const BeamCodebook cb = build_codebook(2, 4);
  RngStream rng(302, "cluster");
  SUBCASE("one cluster per UE isolates every UE") {
    const BeamPilotMatrix p = build_beam_pilots(cb, 3, 3, rng);
    CHECK(p.pilot_slots() == 12);
    for (int t = 0; t < 12; ++t) {
      CHECK(p.b_mat.col(t).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("a single cluster activates everyone at once") {
    const BeamPilotMatrix p = build_beam_pilots(cb, 3, 1, rng);
    CHECK(p.pilot_slots() == 4);
    for (int t = 0; t < 4; ++t) {
      CHECK(p.b_mat.col(t).squaredNorm() == doctest::Approx(3.0).epsilon(1e-12));
    }
  }
  SUBCASE("cluster count must divide the UE count") {
    CHECK_THROWS_AS(build_beam_pilots(cb, 8, 3, rng), ClusterSizeMismatch);
  }
}

TEST_CASE("block soft threshold") {
  RngStream rng(303, "test");
  const Mat m = random_matrix(3, 2, rng);
  SUBCASE("zero threshold is the identity") {
    CHECK((block_soft_threshold(m, 0.0) - m).norm() == 0.0);
  }
  SUBCASE("threshold at the norm zeroes the block") {
    CHECK(block_soft_threshold(m, m.norm()).norm() == 0.0);
    CHECK(block_soft_threshold(m, m.norm() * 1.5).norm() == 0.0);
  }
  SUBCASE("shrinkage keeps the direction and the closed-form norm") {
    const double t = 0.4 * m.norm();
    const Mat s = block_soft_threshold(m, t);
    CHECK(s.norm() == doctest::Approx(m.norm() - t).epsilon(1e-12));
    CHECK((s - m * (s.norm() / m.norm())).norm() < 1e-12);
  }
}

TEST_CASE("group lasso with zero penalty solves least squares") {
  const Dims dims{2, 2, 2, 2};  // N_R = 4, N_T = 4
  RngStream rng(304, "test");
  const Mat b_mat = random_matrix(4, 12, rng);
  const Mat h_true = random_matrix(4, 4, rng);
  const Mat y = h_true * b_mat;

  FbsOptions opts;
  opts.mu = 0.0;
  opts.tol = 1e-12;
  opts.max_iter = 20000;
  const FbsResult res = fbs_group_lasso(y, b_mat, dims, opts);
  // full row rank pilots: the LS solution is h_true itself
  CHECK((res.h - h_true).norm() < 1e-6 * h_true.norm());
  CHECK(res.converged);
}

TEST_CASE("huge penalty zeroes the estimate and satisfies the subgradient bound") {
  const Dims dims{2, 2, 2, 2};
  RngStream rng(305, "test");
  const Mat b_mat = random_matrix(4, 12, rng);
  const Mat y = random_matrix(4, 12, rng);

  // mu above every ||(Y B^H)_{l,k}||_F makes H = 0 stationary
  const Mat g0 = y * b_mat.adjoint();
  double mu = 0.0;
  for (int l = 0; l < 2; ++l)
    for (int k = 0; k < 2; ++k) mu = std::max(mu, block_of(g0, dims, l, k).norm());
  FbsOptions opts;
  opts.mu = mu * 1.01;
  const FbsResult res = fbs_group_lasso(y, b_mat, dims, opts);
  CHECK(res.h.norm() == 0.0);
}

TEST_CASE("objective trace decreases monotonically") {
  const Dims dims{2, 2, 2, 2};
  RngStream rng(306, "test");
  const Mat b_mat = random_matrix(4, 10, rng);
  const Mat y = random_matrix(4, 10, rng);
  FbsOptions opts;
  opts.mu = 0.3;
  opts.max_iter = 200;
  opts.tol = 0.0;  // run all iterations
  const FbsResult res = fbs_group_lasso(y, b_mat, dims, opts);
  REQUIRE(res.objective_trace.size() == 200);
  for (std::size_t i = 1; i < res.objective_trace.size(); ++i) {
    CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-12);
  }
}

TEST_CASE("group lasso recovers a planted block-sparse channel") {
  const Dims dims{2, 2, 2, 2};
  const BeamCodebook cb = build_codebook(2, 8);
  RngStream rng(307, "cluster");
  const BeamPilotMatrix pilots = build_beam_pilots(cb, 2, 2, rng);

  Mat h_true = Mat::Zero(4, 4);
  RngStream hr(308, "test");
  h_true.block(0, 0, 2, 2) = random_matrix(2, 2, hr);  // blocks (0,0) and (1,1)
  h_true.block(2, 2, 2, 2) = random_matrix(2, 2, hr);
  const Mat y = h_true * pilots.b_mat;

  FbsOptions opts;
  opts.mu = 1e-4 * h_true.norm();
  opts.tol = 1e-12;
  opts.max_iter = 20000;
  const FbsResult res = fbs_group_lasso(y, pilots.b_mat, dims, opts);
  REQUIRE(res.converged);

  CHECK(block_of(res.h, dims, 0, 0).norm() ==
        doctest::Approx(h_true.block(0, 0, 2, 2).norm()).epsilon(0.05));
  CHECK(block_of(res.h, dims, 1, 1).norm() ==
        doctest::Approx(h_true.block(2, 2, 2, 2).norm()).epsilon(0.05));
  // planted zeros stay negligible
  CHECK(block_of(res.h, dims, 0, 1).norm() < 0.05 * h_true.norm());
  CHECK(block_of(res.h, dims, 1, 0).norm() < 0.05 * h_true.norm());
}

TEST_CASE("converged runs satisfy the stationarity conditions") {
  const Dims dims{2, 2, 2, 2};
  RngStream rng(309, "test");
  const Mat b_mat = random_matrix(4, 16, rng);
  Mat h_true = Mat::Zero(4, 4);
  h_true.block(0, 0, 2, 2) = random_matrix(2, 2, rng);
  const Mat y = h_true * b_mat + random_matrix(4, 16, rng, 1e-4);

  FbsOptions opts;
  opts.mu = 0.05;
  opts.tol = 1e-13;
  opts.max_iter = 50000;
  const FbsResult res = fbs_group_lasso(y, b_mat, dims, opts);
  REQUIRE(res.converged);

  const Mat grad = (res.h * b_mat - y) * b_mat.adjoint();
  const double eps = 1e-4;
  for (int l = 0; l < 2; ++l) {
    for (int k = 0; k < 2; ++k) {
      const Mat gb = block_of(grad, dims, l, k);
      const Mat hb = block_of(res.h, dims, l, k);
      if (hb.norm() > 1e-9) {
        CHECK((gb + opts.mu * hb / hb.norm()).norm() <= eps * opts.mu);
      } else {
        CHECK(gb.norm() <= opts.mu * (1.0 + eps));
      }
    }
  }
}

TEST_CASE("non-convergence is flagged, not thrown") {
  const Dims dims{2, 2, 2, 2};
  RngStream rng(310, "test");
  const Mat b_mat = random_matrix(4, 10, rng);
  const Mat y = random_matrix(4, 10, rng);
  FbsOptions opts;
  opts.mu = 0.1;
  opts.tol = 1e-16;
  opts.max_iter = 3;
  const FbsResult res = fbs_group_lasso(y, b_mat, dims, opts);
  CHECK(!res.converged);
  CHECK(res.iterations == 3);
}

TEST_CASE("mismatched shapes are rejected") {
  const Dims dims{2, 2, 2, 2};
  FbsOptions opts;
  CHECK_THROWS_AS(fbs_group_lasso(Mat::Zero(4, 9), Mat::Zero(4, 10), dims, opts),
                  ConfigError);
  CHECK_THROWS_AS(fbs_group_lasso(Mat::Zero(4, 10), Mat::Zero(3, 10), dims, opts),
                  ConfigError);
}

TEST_CASE("default regularizer follows the noise scaling") {
  CHECK(default_mu(6.0, 0.25, 4, 16) ==
        doctest::Approx(6.0 * std::sqrt(0.25 * 4 * 16)).epsilon(1e-12));
  CHECK(default_mu(1.0, 0.0, 4, 16) == 0.0);
}

TEST_CASE("pre-BA estimation pipeline on a noiseless determined system") {
  SystemConfig cfg;
  cfg.num_aps = 2;
  cfg.num_ues = 2;
  cfg.ap_antennas = 2;
  cfg.ue_antennas = 2;
  cfg.num_subcarriers = 4;
  cfg.codebook_size = 4;
  cfg.pilot_clusters = 2;
  cfg.sampled_subcarriers = {1, 3};

  const BeamCodebook cb = build_codebook(2, 4);
  RngStream crng(311, "cluster");
  const BeamPilotMatrix pilots = build_beam_pilots(cb, 2, 2, crng);

  ChannelTensor t;
  t.dims = cfg.dims();
  t.num_subcarriers = 4;
  RngStream hrng(312, "test");
  for (int v = 0; v < 4; ++v) t.per_subcarrier.push_back(random_matrix(4, 4, hrng));

  FbsOptions opts;
  opts.mu = 1e-8;
  opts.tol = 1e-13;
  opts.max_iter = 50000;
  std::vector<Mat> zero_noise = {Mat::Zero(4, pilots.pilot_slots()),
                                 Mat::Zero(4, pilots.pilot_slots())};
  const ChannelEstimate est = pre_ba_chest(t, pilots, cfg.sampled_subcarriers,
                                           opts, zero_noise);
  REQUIRE(est.h_hat.size() == 2);
  CHECK(est.sampled == std::vector<int>{1, 3});
  CHECK((est.h_hat[0] - t.at(0)).norm() < 1e-5 * t.at(0).norm());
  CHECK((est.h_hat[1] - t.at(2)).norm() < 1e-5 * t.at(2).norm());

  // the estimate-based surrogate follows the strongest estimated block
  const SurrogateMatrix s = extract_surrogate(est);
  for (int l = 0; l < 2; ++l) {
    for (int k = 0; k < 2; ++k) {
      const double n1 = block_of(est.h_hat[0], t.dims, l, k).squaredNorm();
      const double n2 = block_of(est.h_hat[1], t.dims, l, k).squaredNorm();
      CHECK(s.chosen_subcarrier[l * 2 + k] == (n1 >= n2 ? 1 : 3));
    }
  }

  // determinism of the stream overload
  const double n0 = 1e-3;
  RngStream a(313, "pilot_noise"), b(313, "pilot_noise");
  const ChannelEstimate e1 = pre_ba_chest(t, pilots, cfg.sampled_subcarriers, opts, n0, a);
  const ChannelEstimate e2 = pre_ba_chest(t, pilots, cfg.sampled_subcarriers, opts, n0, b);
  for (int i = 0; i < 2; ++i) CHECK((e1.h_hat[i] - e2.h_hat[i]).norm() == 0.0);

  // block-norm diagnostics match the estimates
  const auto norms = est.block_norms();
  REQUIRE(norms.size() == 2);
  CHECK(norms[0][0] == doctest::Approx(block_of(est.h_hat[0], t.dims, 0, 0).norm())
                           .epsilon(1e-12));
}

TEST_CASE("post-BA least squares is exact without noise") {
  RngStream rng(314, "test");
  EffectiveChannel g;
  g.per_subcarrier = {random_matrix(6, 3, rng), random_matrix(6, 3, rng)};
  const double es = 1.7;
  const int n_p = next_pow2(3);
  std::vector<Mat> zero_noise = {Mat::Zero(6, n_p), Mat::Zero(6, n_p)};
  const EffectiveChannel est = post_ba_chest(g, es, zero_noise);
  REQUIRE(est.per_subcarrier.size() == 2);
  for (int v = 0; v < 2; ++v) {
    CHECK((est.per_subcarrier[v] - g.per_subcarrier[v]).norm() <
          1e-12 * g.per_subcarrier[v].norm());
  }
}

TEST_CASE("post-BA estimation error variance matches the LS prediction") {
  RngStream rng(315, "test");
  EffectiveChannel g;
  g.per_subcarrier = {random_matrix(4, 3, rng)};
  const double es = 2.0, n0 = 0.5;
  const int n_p = next_pow2(3);
  const double predicted = n0 / (n_p * es);

  double acc = 0.0;
  long count = 0;
  RngStream nrng(316, "post_pilot_noise");
  for (int draw = 0; draw < 400; ++draw) {
    const EffectiveChannel est = post_ba_chest(g, n0, es, nrng);
    acc += (est.per_subcarrier[0] - g.per_subcarrier[0]).squaredNorm();
    count += g.per_subcarrier[0].size();
  }
  CHECK(acc / count == doctest::Approx(predicted).epsilon(0.08));
}
