// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include "cfmimo/beam_alignment.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/chest.hpp"
#include "cfmimo/detection.hpp"
#include "cfmimo/model.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

std::string chest_mode_name(ChestMode m) {
  switch (m) {
    case ChestMode::genie: return "genie";
    case ChestMode::pre_ba_only: return "pre_ba_only";
    case ChestMode::full: return "full";
  }
  return "unknown";
}

ChestMode parse_chest_mode(const std::string& name) {
  if (name == "genie") return ChestMode::genie;
  if (name == "pre_ba_only") return ChestMode::pre_ba_only;
  if (name == "full") return ChestMode::full;
  throw ConfigError("unknown chest mode: " + name);
}

void ExperimentSpec::validate() const {
  scenario.validate();
  if (num_drops < 1) throw ConfigError("num_drops must be >= 1");
  if (data_slots < 1) throw ConfigError("data_slots must be >= 1");
  if (methods.empty()) throw ConfigError("no beam-alignment methods selected");
  if ((dump_beams || dump_chest) && out_dir.empty()) {
    throw ConfigError("--dump flags need an output directory");
  }
}

namespace {

struct DropResult {
  // per method name: metrics in UE-major / (UE, subcarrier) order
  std::map<std::string, std::vector<double>> rmsse;
  std::map<std::string, std::vector<double>> se;
  std::map<std::string, std::vector<double>> sinr_db;
  std::vector<double> pilot_snr_db;  // per UE (chest modes)
  long ia_regressions = 0;
  long chest_nonconverged = 0;
};

std::vector<Mat> draw_noise_bank(std::uint64_t seed, const char* stage, int drop,
                                 const std::vector<int>& subcarriers_1based,
                                 Eigen::Index rows, Eigen::Index cols, double n0) {
  std::vector<Mat> out(subcarriers_1based.size());
  for (std::size_t i = 0; i < subcarriers_1based.size(); ++i) {
    RngStream rng(seed, stage, static_cast<std::uint64_t>(drop),
                  static_cast<std::uint64_t>(subcarriers_1based[i]));
    Mat n(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) n(r, c) = rng.cgaussian(n0);
    }
    out[i] = std::move(n);
  }
  return out;
}

std::vector<int> all_subcarriers(int n_sc) {
  std::vector<int> v(n_sc);
  for (int i = 0; i < n_sc; ++i) v[i] = i + 1;
  return v;
}

void dump_assignment(const std::string& out_dir, int drop,
                     const BeamAssignment& a) {
  const std::string path = out_dir + "/beams_drop" + std::to_string(drop) + "_" +
                           method_name(a.method) + ".txt";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << serialize_assignment(a);
}

void dump_chest_diagnostics(const std::string& out_dir, int drop,
                            const ChannelEstimate& est) {
  char buf[128];
  {
    const std::string path =
        out_dir + "/chest_iters_drop" + std::to_string(drop) + ".csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# cfmimo-chest v1\nsubcarrier,iterations,converged,final_objective\n";
    for (std::size_t i = 0; i < est.sampled.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%.12g\n", est.sampled[i],
                    est.iterations[i], est.converged[i] ? 1 : 0,
                    est.objective_traces[i].empty()
                        ? 0.0
                        : est.objective_traces[i].back());
      out << buf;
    }
  }
  {
    const std::string path =
        out_dir + "/chest_trace_drop" + std::to_string(drop) + ".csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# cfmimo-chest v1\nsubcarrier,iteration,objective\n";
    for (std::size_t i = 0; i < est.sampled.size(); ++i) {
      for (std::size_t it = 0; it < est.objective_traces[i].size(); ++it) {
        std::snprintf(buf, sizeof buf, "%d,%zu,%.12g\n", est.sampled[i], it + 1,
                      est.objective_traces[i][it]);
        out << buf;
      }
    }
  }
  {
    const std::string path =
        out_dir + "/chest_support_drop" + std::to_string(drop) + ".csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# cfmimo-chest v1\nsubcarrier,ap,ue,block_norm\n";
    const auto norms = est.block_norms();
    for (std::size_t i = 0; i < est.sampled.size(); ++i) {
      for (int l = 0; l < est.dims.num_aps; ++l) {
        for (int k = 0; k < est.dims.num_ues; ++k) {
          std::snprintf(buf, sizeof buf, "%d,%d,%d,%.12g\n", est.sampled[i],
                        l + 1, k + 1, norms[i][l * est.dims.num_ues + k]);
          out << buf;
        }
      }
    }
  }
}

DropResult run_drop(int drop, const ExperimentSpec& spec, const SystemConfig& cfg,
                    const BeamCodebook& codebook, double n0,
                    const ChannelTensor* imported) {
  const double es = cfg.symbol_energy;
  const std::uint64_t seed = spec.seed ? spec.seed : cfg.seed;
  const int K = cfg.num_ues;
  const int n_sc = cfg.num_subcarriers;
  const int T = spec.data_slots;

  Geometry geom;
  if (spec.scenario.fixed_geometry) {
    geom = *spec.scenario.fixed_geometry;
  } else {
    RngStream rng(seed, "geometry", static_cast<std::uint64_t>(drop));
    geom = make_grid_geometry(*spec.scenario.grid, cfg, rng);
  }

  ChannelTensor raw;
  if (imported) {
    raw = *imported;
  } else {
    RngStream rng(seed, "paths", static_cast<std::uint64_t>(drop));
    raw = paths_to_tensor(generate_paths(geom, cfg, spec.scenario.channel, rng),
                          cfg);
  }

  const bool want_single = std::any_of(
      spec.methods.begin(), spec.methods.end(),
      [](BaMethod m) { return m == BaMethod::single_antenna; });
  const bool want_multi = std::any_of(
      spec.methods.begin(), spec.methods.end(),
      [](BaMethod m) { return m != BaMethod::single_antenna; });

  ChannelTensor tensor_ma;
  if (want_multi) {
    tensor_ma = raw;
    apply_power_control(tensor_ma, cfg);
  }
  ChannelTensor tensor_sa;
  if (want_single) {
    tensor_sa = slice_first_ue_antenna(raw);
    apply_power_control(tensor_sa, cfg);
  }

  DropResult res;

  // Surrogate for the multi-antenna methods: truth or pre-BA estimate.
  SurrogateMatrix surrogate;
  if (want_multi) {
    if (spec.chest_mode == ChestMode::genie) {
      surrogate = extract_surrogate(tensor_ma, cfg.sampled_subcarriers);
    } else {
      RngStream cluster_rng(seed, "cluster", static_cast<std::uint64_t>(drop));
      const BeamPilotMatrix pilots =
          build_beam_pilots(codebook, K, cfg.pilot_clusters, cluster_rng);
      const auto pilot_noise =
          draw_noise_bank(seed, "pilot_noise", drop, cfg.sampled_subcarriers,
                          cfg.dims().rx(), pilots.pilot_slots(), n0);
      FbsOptions opts;
      opts.mu = default_mu(spec.scenario.chest.mu_alpha, n0, cfg.ap_antennas,
                           cfg.codebook_size);
      opts.tol = spec.scenario.chest.fbs_tol;
      opts.max_iter = spec.scenario.chest.fbs_max_iter;
      const ChannelEstimate est =
          pre_ba_chest(tensor_ma, pilots, cfg.sampled_subcarriers, opts,
                       pilot_noise);
      for (bool c : est.converged) {
        if (!c) ++res.chest_nonconverged;
      }
      surrogate = extract_surrogate(est);
      if (spec.dump_chest) dump_chest_diagnostics(spec.out_dir, drop, est);
    }
  }

  // Average per-antenna-pair channel gain over noise at the best AP; a
  // diagnostic for whether pilots are strong enough for the estimator.
  if (spec.chest_mode != ChestMode::genie && want_multi) {
    res.pilot_snr_db.resize(K);
    const Dims dims = cfg.dims();
    for (int k = 0; k < K; ++k) {
      double best = 0.0;
      for (int l = 0; l < cfg.num_aps; ++l) {
        double acc = 0.0;
        for (int v1 : cfg.sampled_subcarriers) {
          acc += tensor_ma.block(v1 - 1, l, k).squaredNorm();
        }
        acc /= static_cast<double>(cfg.sampled_subcarriers.size()) *
               dims.ap_antennas * dims.ue_antennas;
        best = std::max(best, acc);
      }
      res.pilot_snr_db[k] = linear_to_db(std::max(best / n0, 1e-30));
    }
  }

  // Shared draws: payload, data noise, post-BA pilot noise.
  const std::vector<int> all_v = all_subcarriers(n_sc);
  std::vector<Mat> payload(n_sc);
  for (int v = 0; v < n_sc; ++v) {
    RngStream rng(seed, "payload", static_cast<std::uint64_t>(drop),
                  static_cast<std::uint64_t>(v + 1));
    payload[v] = draw_qpsk(K, T, es, rng);
  }
  const std::vector<Mat> data_noise =
      draw_noise_bank(seed, "data_noise", drop, all_v, cfg.dims().rx(), T, n0);
  std::vector<Mat> post_pilot_noise;
  if (spec.chest_mode == ChestMode::full) {
    post_pilot_noise = draw_noise_bank(seed, "post_pilot_noise", drop, all_v,
                                       cfg.dims().rx(), next_pow2(K), n0);
  }

  for (BaMethod m : spec.methods) {
    BeamAssignment assignment;
    switch (m) {
      case BaMethod::single_antenna:
        assignment = single_antenna_baseline(K);
        break;
      case BaMethod::digital_iu:
        assignment = digital_iu(surrogate);
        break;
      case BaMethod::analog_iu:
        assignment = analog_iu(surrogate, codebook);
        break;
      case BaMethod::analog_ia: {
        IaResult ia = analog_ia(surrogate, codebook, n0, es);
        for (const BaTraceEntry& e : ia.trace) {
          if (e.pass == 2 && e.objective < e.incumbent_objective) {
            ++res.ia_regressions;
          }
        }
        assignment = std::move(ia.assignment);
        break;
      }
      case BaMethod::exhaustive:
        assignment = exhaustive_maxmin(surrogate, codebook, n0, es,
                                       spec.max_combinations);
        break;
    }
    if (spec.dump_beams) dump_assignment(spec.out_dir, drop, assignment);

    const ChannelTensor& tensor =
        m == BaMethod::single_antenna ? tensor_sa : tensor_ma;
    const EffectiveChannel g_true = effective_channel(tensor, assignment);
    const EffectiveChannel* g_used = &g_true;
    EffectiveChannel g_est;
    if (spec.chest_mode == ChestMode::full) {
      g_est = post_ba_chest(g_true, es, post_pilot_noise);
      g_used = &g_est;
    }
    const EqualizerBank w = lmmse_bank(*g_used, n0, es);
    const DetectionResult det = transmit_detect(g_true, w, payload, data_noise, es);

    const std::string name = method_name(m);
    res.rmsse[name] = rmsse(det.soft, payload);
    std::vector<double>& sinr_out = res.sinr_db[name];
    sinr_out.resize(static_cast<std::size_t>(K) * n_sc);
    std::vector<double>& se_out = res.se[name];
    se_out.resize(K);
    std::vector<double> per_ue(n_sc);
    for (int k = 0; k < K; ++k) {
      for (int v = 0; v < n_sc; ++v) {
        const double s = sinr(k, g_true.per_subcarrier[v], w.per_subcarrier[v],
                              n0, es);
        per_ue[v] = s;
        sinr_out[static_cast<std::size_t>(k) * n_sc + v] =
            linear_to_db(std::max(s, 1e-30));
      }
      se_out[k] = spectral_efficiency(per_ue);
    }
  }
  return res;
}

}  // namespace

MetricsReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const SystemConfig& cfg = spec.scenario.system;
  const double n0 = noise_power_per_subcarrier(cfg);
  const BeamCodebook codebook = build_codebook(cfg.ue_antennas, cfg.codebook_size);
  const int K = cfg.num_ues;
  const int n_sc = cfg.num_subcarriers;

  std::optional<ChannelTensor> imported;
  if (!spec.channels_path.empty()) {
    if (spec.num_drops != 1) {
      throw ConfigError("imported channels support exactly one drop");
    }
    LoadedTensor lt = load_tensor(spec.channels_path);
    if (!(lt.tensor.dims == cfg.dims()) ||
        lt.tensor.num_subcarriers != cfg.num_subcarriers) {
      throw ConfigError("imported tensor dimensions disagree with the config");
    }
    imported = std::move(lt.tensor);
  }

  if (!spec.out_dir.empty()) std::filesystem::create_directories(spec.out_dir);

  std::vector<DropResult> results(spec.num_drops);
  std::vector<std::string> errors(spec.num_drops);
#pragma omp parallel for schedule(dynamic)
  for (int d = 0; d < spec.num_drops; ++d) {
    try {
      results[d] = run_drop(d, spec, cfg, codebook, n0,
                            imported ? &*imported : nullptr);
    } catch (const std::exception& e) {
      errors[d] = e.what();
    }
  }
  for (int d = 0; d < spec.num_drops; ++d) {
    if (!errors[d].empty()) {
      throw std::runtime_error("drop " + std::to_string(d) +
                               " failed: " + errors[d]);
    }
  }

  MetricsReport report;
  report.num_ues = K;
  report.num_subcarriers = n_sc;
  report.num_drops = spec.num_drops;
  for (BaMethod m : spec.methods) report.methods.push_back(method_name(m));
  for (const std::string& name : report.methods) {
    MethodMetrics& mm = report.per_method[name];
    mm.rmsse.reserve(static_cast<std::size_t>(K) * spec.num_drops);
    mm.se.reserve(static_cast<std::size_t>(K) * spec.num_drops);
    mm.sinr_db.reserve(static_cast<std::size_t>(K) * n_sc * spec.num_drops);
  }
  for (const DropResult& r : results) {
    for (const std::string& name : report.methods) {
      MethodMetrics& mm = report.per_method[name];
      const auto& rm = r.rmsse.at(name);
      mm.rmsse.insert(mm.rmsse.end(), rm.begin(), rm.end());
      const auto& se = r.se.at(name);
      mm.se.insert(mm.se.end(), se.begin(), se.end());
      const auto& si = r.sinr_db.at(name);
      mm.sinr_db.insert(mm.sinr_db.end(), si.begin(), si.end());
    }
    report.ia_pass2_regressions += r.ia_regressions;
    report.chest_nonconverged += r.chest_nonconverged;
    report.pilot_snr_db.insert(report.pilot_snr_db.end(), r.pilot_snr_db.begin(),
                               r.pilot_snr_db.end());
  }

  if (!spec.out_dir.empty()) emit_cdfs(report, spec.out_dir);
  return report;
}

namespace {

SurrogateMatrix random_surrogate(const Dims& dims, RngStream& rng) {
  SurrogateMatrix s;
  s.dims = dims;
  s.h = Mat(dims.rx(), dims.tx());
  for (Eigen::Index c = 0; c < s.h.cols(); ++c) {
    for (Eigen::Index r = 0; r < s.h.rows(); ++r) s.h(r, c) = rng.cgaussian(1.0);
  }
  s.chosen_subcarrier.assign(
      static_cast<std::size_t>(dims.num_aps) * dims.num_ues, 1);
  return s;
}

bool check(std::ostream& out, const std::string& name, bool ok,
           const std::string& detail = "") {
  out << "oracle " << name << ": " << (ok ? "pass" : "FAIL");
  if (!ok && !detail.empty()) out << " (" << detail << ")";
  out << "\n";
  return ok;
}

}  // namespace

int run_oracle_suite(std::ostream& out, std::uint64_t seed) {
  int failures = 0;
  const double es = 1.0;

  {  // LMMSE matches the matrix-inversion-lemma form.
    RngStream rng(seed, "oracle_lmmse");
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n_rx = 4 + static_cast<int>(rng.uniform_int(12));
      const int K = 1 + static_cast<int>(rng.uniform_int(6));
      Mat g(n_rx, K);
      for (Eigen::Index c = 0; c < K; ++c) {
        for (Eigen::Index r = 0; r < n_rx; ++r) g(r, c) = rng.cgaussian(1.0);
      }
      const double n0 = 0.01 + rng.uniform();
      const Mat w = lmmse(g, n0, es);
      Mat big = g * g.adjoint();
      big.diagonal().array() += cplx(n0 / es, 0.0);
      const Mat w_alt = big.ldlt().solve(g);
      worst = std::max(worst, (w - w_alt).norm() / w_alt.norm());
    }
    if (!check(out, "lmmse_inversion_identity", worst <= 1e-9,
               "worst rel err " + std::to_string(worst))) {
      ++failures;
    }
  }

  {  // SINR matches a term-by-term scalar expansion.
    RngStream rng(seed, "oracle_sinr");
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n_rx = 3 + static_cast<int>(rng.uniform_int(8));
      const int K = 2 + static_cast<int>(rng.uniform_int(4));
      Mat g(n_rx, K), w(n_rx, K);
      for (Eigen::Index c = 0; c < K; ++c) {
        for (Eigen::Index r = 0; r < n_rx; ++r) {
          g(r, c) = rng.cgaussian(1.0);
          w(r, c) = rng.cgaussian(1.0);
        }
      }
      const double n0 = 0.01 + rng.uniform();
      for (int k = 0; k < K; ++k) {
        cplx dot = 0.0;
        for (int r = 0; r < n_rx; ++r) dot += std::conj(w(r, k)) * g(r, k);
        double interf = 0.0;
        for (int j = 0; j < K; ++j) {
          if (j == k) continue;
          cplx c2 = 0.0;
          for (int r = 0; r < n_rx; ++r) c2 += std::conj(w(r, k)) * g(r, j);
          interf += es * std::norm(c2);
        }
        double wn = 0.0;
        for (int r = 0; r < n_rx; ++r) wn += std::norm(w(r, k));
        const double expect = es * std::norm(dot) / (interf + n0 * wn);
        const double got = sinr(k, g, w, n0, es);
        worst = std::max(worst, std::abs(got - expect) / expect);
      }
    }
    if (!check(out, "sinr_scalar_expansion", worst <= 1e-10,
               "worst rel err " + std::to_string(worst))) {
      ++failures;
    }
  }

  {  // Exhaustive max-min dominates the greedy; pass 2 never regresses.
    RngStream rng(seed, "oracle_exhaustive");
    const Dims dims{2, 3, 2, 4};
    const BeamCodebook cb = build_codebook(dims.ue_antennas, 4);
    bool dominated = true, local_opt = true;
    for (int trial = 0; trial < 20; ++trial) {
      const SurrogateMatrix s = random_surrogate(dims, rng);
      const double n0 = 0.05;
      const IaResult ia = analog_ia(s, cb, n0, es);
      const BeamAssignment ex = exhaustive_maxmin(s, cb, n0, es, 1 << 20);
      const double m_ia = min_full_sinr(s, ia.assignment.vectors, n0, es);
      const double m_ex = min_full_sinr(s, ex.vectors, n0, es);
      if (m_ex < m_ia) dominated = false;
      for (const BaTraceEntry& e : ia.trace) {
        if (e.pass == 2 && e.objective < e.incumbent_objective) local_opt = false;
      }
    }
    if (!check(out, "exhaustive_dominates_greedy", dominated)) ++failures;
    if (!check(out, "pass2_local_optimality", local_opt)) ++failures;
  }

  {  // Group-lasso prox and the mu=0 least-squares limit.
    RngStream rng(seed, "oracle_fbs");
    bool prox_ok = true;
    for (int trial = 0; trial < 50; ++trial) {
      Mat m(1, 1);
      m(0, 0) = rng.cgaussian(1.0);
      const double t = rng.uniform();
      const Mat r = block_soft_threshold(m, t);
      const double mag = std::abs(m(0, 0));
      const cplx expect =
          mag <= t ? cplx(0, 0) : m(0, 0) * (1.0 - t / mag);
      if (std::abs(r(0, 0) - expect) > 1e-12) prox_ok = false;
    }
    if (!check(out, "block_prox_scalar", prox_ok)) ++failures;

    const Dims dims{2, 2, 2, 2};
    Mat h_true(dims.rx(), dims.tx());
    RngStream rng2(seed, "oracle_fbs_ls");
    for (Eigen::Index c = 0; c < h_true.cols(); ++c) {
      for (Eigen::Index r = 0; r < h_true.rows(); ++r) {
        h_true(r, c) = rng2.cgaussian(1.0);
      }
    }
    Mat b(dims.tx(), 12);
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      for (Eigen::Index r = 0; r < b.rows(); ++r) b(r, c) = rng2.cgaussian(1.0);
    }
    const Mat y = h_true * b;
    FbsOptions opts;
    opts.mu = 0.0;
    opts.tol = 1e-10;
    opts.max_iter = 20000;
    const FbsResult fr = fbs_group_lasso(y, b, dims, opts);
    const Mat ls = (b * b.adjoint()).ldlt().solve(b * y.adjoint()).adjoint();
    const double err = (fr.h - ls).norm() / ls.norm();
    if (!check(out, "fbs_zero_mu_least_squares", err <= 1e-6,
               "rel err " + std::to_string(err))) {
      ++failures;
    }
    bool monotone = true;
    for (std::size_t i = 1; i < fr.objective_trace.size(); ++i) {
      if (fr.objective_trace[i] > fr.objective_trace[i - 1] * (1 + 1e-12)) {
        monotone = false;
      }
    }
    if (!check(out, "fbs_monotone_objective", monotone)) ++failures;
  }

  {  // Post-BA LS is exact without noise.
    RngStream rng(seed, "oracle_postba");
    EffectiveChannel g;
    g.per_subcarrier.resize(3);
    for (Mat& m : g.per_subcarrier) {
      m = Mat(6, 3);
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.cgaussian(1.0);
      }
    }
    std::vector<Mat> zero_noise(3, Mat::Zero(6, next_pow2(3)));
    const EffectiveChannel est = post_ba_chest(g, es, zero_noise);
    double worst = 0.0;
    for (int v = 0; v < 3; ++v) {
      worst = std::max(worst, (est.per_subcarrier[v] - g.per_subcarrier[v]).norm() /
                                  g.per_subcarrier[v].norm());
    }
    if (!check(out, "post_ba_noiseless_exact", worst <= 1e-12,
               "worst rel err " + std::to_string(worst))) {
      ++failures;
    }
  }

  out << (failures == 0 ? "oracle suite: all checks passed\n"
                        : "oracle suite: FAILURES present\n");
  return failures;
}

}  // namespace cfmimo
