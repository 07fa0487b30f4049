// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: `run` (Monte-Carlo experiments), `oracle`
// (brute-force validation suite), `export-channels` / `import-channels`
// (binary tensor files).
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "cfmimo/channel.hpp"
#include "cfmimo/harness.hpp"
#include "cfmimo/model.hpp"
#include "cfmimo/rng.hpp"

namespace {

cfmimo::ChannelTensor generate_drop_tensor(const cfmimo::Scenario& scenario,
                                           std::uint64_t seed, int drop) {
  const cfmimo::SystemConfig& cfg = scenario.system;
  cfmimo::Geometry geom;
  if (scenario.fixed_geometry) {
    geom = *scenario.fixed_geometry;
  } else {
    cfmimo::RngStream rng(seed, "geometry", static_cast<std::uint64_t>(drop));
    geom = cfmimo::make_grid_geometry(*scenario.grid, cfg, rng);
  }
  cfmimo::RngStream rng(seed, "paths", static_cast<std::uint64_t>(drop));
  return cfmimo::paths_to_tensor(
      cfmimo::generate_paths(geom, cfg, scenario.channel, rng), cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-free mmWave MU-MIMO uplink simulator"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (0 = library default)");

  // ---- run ----
  auto* run = app.add_subcommand("run", "run a Monte-Carlo experiment");
  std::string config_path, out_dir = "results", chest = "genie", channels_in;
  std::vector<std::string> methods = {"single_antenna", "digital_iu", "analog_iu",
                                      "analog_ia"};
  int drops = 1, slots = 16;
  std::uint64_t seed = 0, max_comb = 1ull << 20;
  bool dump_beams = false, dump_chest = false;
  run->add_option("--config", config_path, "scenario config (JSON)")->required();
  run->add_option("--methods", methods,
                  "beam-alignment methods, comma-separated (single_antenna digital_iu "
                  "analog_iu analog_ia exhaustive)")
      ->delimiter(',');
  run->add_option("--chest", chest, "channel knowledge: genie|pre_ba_only|full");
  run->add_option("--drops", drops, "Monte-Carlo drops");
  run->add_option("--slots", slots, "data slots per drop (T_D)");
  run->add_option("--seed", seed, "override the config seed (0 = keep)");
  run->add_option("--out", out_dir, "output directory for CSV files");
  run->add_option("--channels", channels_in,
                  "use an imported channel tensor instead of generating one");
  run->add_option("--max-combinations", max_comb,
                  "budget guard for the exhaustive method");
  run->add_flag("--dump-beams", dump_beams, "write per-drop beam assignments");
  run->add_flag("--dump-chest", dump_chest, "write per-drop solver diagnostics");

  // ---- oracle ----
  auto* oracle = app.add_subcommand(
      "oracle", "cross-check core algebra against brute-force oracles");
  std::uint64_t oracle_seed = 7;
  oracle->add_option("--seed", oracle_seed, "oracle RNG seed");

  // ---- export-channels ----
  auto* exp = app.add_subcommand("export-channels",
                                 "generate one drop's channel tensor to a file");
  std::string exp_config, exp_out = "channels.cfmt";
  int exp_drop = 0;
  std::uint64_t exp_seed = 0;
  bool exp_single = false;
  exp->add_option("--config", exp_config, "scenario config (JSON)")->required();
  exp->add_option("--out", exp_out, "output tensor path");
  exp->add_option("--drop", exp_drop, "drop index to generate");
  exp->add_option("--seed", exp_seed, "override the config seed (0 = keep)");
  exp->add_flag("--single-precision", exp_single, "store complex64 payload");

  // ---- import-channels ----
  auto* imp = app.add_subcommand("import-channels",
                                 "inspect/validate a channel tensor file");
  std::string imp_in, imp_config;
  imp->add_option("--in", imp_in, "tensor path")->required();
  imp->add_option("--config", imp_config,
                  "optional config to validate dimensions against");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (run->parsed()) {
      cfmimo::ExperimentSpec spec;
      spec.scenario = cfmimo::load_scenario(config_path);
      for (const std::string& m : methods) {
        spec.methods.push_back(cfmimo::parse_method(m));
      }
      spec.chest_mode = cfmimo::parse_chest_mode(chest);
      spec.num_drops = drops;
      spec.data_slots = slots;
      spec.seed = seed;
      spec.out_dir = out_dir;
      spec.channels_path = channels_in;
      spec.dump_beams = dump_beams;
      spec.dump_chest = dump_chest;
      spec.max_combinations = max_comb;

      const cfmimo::MetricsReport report = cfmimo::run_experiment(spec);
      std::printf("drops=%d ues=%d subcarriers=%d chest=%s\n", report.num_drops,
                  report.num_ues, report.num_subcarriers, chest.c_str());
      for (const std::string& m : report.methods) {
        const cfmimo::MethodMetrics& mm = report.per_method.at(m);
        std::printf(
            "%-15s mean_se=%.4f p50_se=%.4f bottom_decile_se=%.4f "
            "mean_rmsse=%.4f\n",
            m.c_str(), cfmimo::mean(mm.se), cfmimo::quantile(mm.se, 0.5),
            cfmimo::bottom_decile_mean(mm.se), cfmimo::mean(mm.rmsse));
      }
      if (report.ia_pass2_regressions > 0) {
        std::printf("warning: %ld pass-2 objective regressions\n",
                    report.ia_pass2_regressions);
      }
      if (report.chest_nonconverged > 0) {
        std::printf("warning: %ld estimator solves hit max_iter\n",
                    report.chest_nonconverged);
      }
      if (!report.pilot_snr_db.empty()) {
        std::printf("pilot_snr_db p10=%.2f p50=%.2f\n",
                    cfmimo::quantile(report.pilot_snr_db, 0.1),
                    cfmimo::quantile(report.pilot_snr_db, 0.5));
      }
      std::printf("wrote CSVs to %s\n", out_dir.c_str());
      return 0;
    }

    if (oracle->parsed()) {
      const int failures = cfmimo::run_oracle_suite(std::cout, oracle_seed);
      return failures == 0 ? 0 : 1;
    }

    if (exp->parsed()) {
      const cfmimo::Scenario scenario = cfmimo::load_scenario(exp_config);
      const std::uint64_t use_seed =
          exp_seed ? exp_seed : scenario.system.seed;
      cfmimo::Scenario seeded = scenario;
      seeded.system.seed = use_seed;
      const cfmimo::ChannelTensor t =
          generate_drop_tensor(seeded, use_seed, exp_drop);
      cfmimo::save_tensor(exp_out, t, use_seed, cfmimo::scenario_hash(scenario),
                          exp_single);
      std::printf("wrote %s (n_sc=%d, %dx%d blocks of %dx%d)\n", exp_out.c_str(),
                  t.num_subcarriers, t.dims.num_aps, t.dims.num_ues,
                  t.dims.ap_antennas, t.dims.ue_antennas);
      return 0;
    }

    if (imp->parsed()) {
      const cfmimo::LoadedTensor lt = cfmimo::load_tensor(imp_in);
      std::printf(
          "tensor %s: n_sc=%d aps=%d ues=%d ap_antennas=%d ue_antennas=%d "
          "seed=%llu config_hash=%016llx\n",
          imp_in.c_str(), lt.tensor.num_subcarriers, lt.tensor.dims.num_aps,
          lt.tensor.dims.num_ues, lt.tensor.dims.ap_antennas,
          lt.tensor.dims.ue_antennas,
          static_cast<unsigned long long>(lt.seed),
          static_cast<unsigned long long>(lt.config_hash));
      if (!imp_config.empty()) {
        const cfmimo::Scenario scenario = cfmimo::load_scenario(imp_config);
        if (!(lt.tensor.dims == scenario.system.dims()) ||
            lt.tensor.num_subcarriers != scenario.system.num_subcarriers) {
          throw cfmimo::ConfigError("tensor dimensions disagree with the config");
        }
        if (lt.config_hash != cfmimo::scenario_hash(scenario)) {
          std::printf("note: config hash differs (tensor from another setup)\n");
        } else {
          std::printf("config hash matches\n");
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
