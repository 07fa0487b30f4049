// SPDX-License-Identifier: Apache-2.0
//
// Parallel kernels vs. their serial reference routes on a mid-size scenario.
#include <benchmark/benchmark.h>

#include "cfmimo/beam_alignment.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/detection.hpp"
#include "cfmimo/model.hpp"
#include "cfmimo/reference.hpp"
#include "cfmimo/rng.hpp"

namespace {

using namespace cfmimo;

struct Fixture {
  SystemConfig cfg;
  PathSet paths;
  ChannelTensor tensor;
  BeamAssignment assignment;
  EffectiveChannel g;
  EqualizerBank w;
  std::vector<Mat> payload;
  std::vector<Mat> noise;
  double n0 = 0.0;

  Fixture() {
    cfg.num_aps = 8;
    cfg.num_ues = 16;
    cfg.ap_antennas = 4;
    cfg.ue_antennas = 8;
    cfg.num_subcarriers = 256;
    cfg.codebook_size = 16;
    cfg.pilot_clusters = 4;
    cfg.carrier_freq_hz = 28e9;
    cfg.bandwidth_hz = 400e6;
    cfg.sampled_subcarriers = {1, 64, 128, 192, 256};
    cfg.seed = 11;

    GridLayout grid;
    grid.area_x_m = 150;
    grid.area_y_m = 150;
    grid.grid_pitch_m = 5;
    RngStream geo_rng(cfg.seed, "geometry", 0);
    const Geometry geom = make_grid_geometry(grid, cfg, geo_rng);
    ChannelModelParams params;
    RngStream path_rng(cfg.seed, "paths", 0);
    paths = generate_paths(geom, cfg, params, path_rng);
    tensor = cfmimo::paths_to_tensor(paths, cfg);
    apply_power_control(tensor, cfg);
    n0 = noise_power_per_subcarrier(cfg);

    const BeamCodebook cb = build_codebook(cfg.ue_antennas, cfg.codebook_size);
    assignment = analog_iu(extract_surrogate(tensor, cfg.sampled_subcarriers), cb);
    g = cfmimo::effective_channel(tensor, assignment);
    w = cfmimo::lmmse_bank(g, n0, cfg.symbol_energy);

    RngStream data_rng(cfg.seed, "bench_data", 0);
    payload.resize(cfg.num_subcarriers);
    noise.resize(cfg.num_subcarriers);
    for (int v = 0; v < cfg.num_subcarriers; ++v) {
      payload[v] = draw_qpsk(cfg.num_ues, 16, cfg.symbol_energy, data_rng);
      Mat nm(cfg.dims().rx(), 16);
      for (Eigen::Index c = 0; c < nm.cols(); ++c) {
        for (Eigen::Index r = 0; r < nm.rows(); ++r) {
          nm(r, c) = data_rng.cgaussian(n0);
        }
      }
      noise[v] = std::move(nm);
    }
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_PathsToTensor(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cfmimo::paths_to_tensor(f.paths, f.cfg));
  }
}
BENCHMARK(BM_PathsToTensor)->Unit(benchmark::kMillisecond);

void BM_PathsToTensorSerial(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::paths_to_tensor(f.paths, f.cfg));
  }
}
BENCHMARK(BM_PathsToTensorSerial)->Unit(benchmark::kMillisecond);

void BM_LmmseBank(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cfmimo::lmmse_bank(f.g, f.n0, 1.0));
  }
}
BENCHMARK(BM_LmmseBank)->Unit(benchmark::kMillisecond);

void BM_LmmseBankSerial(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::lmmse_bank(f.g, f.n0, 1.0));
  }
}
BENCHMARK(BM_LmmseBankSerial)->Unit(benchmark::kMillisecond);

void BM_EffectiveChannel(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cfmimo::effective_channel(f.tensor, f.assignment));
  }
}
BENCHMARK(BM_EffectiveChannel)->Unit(benchmark::kMillisecond);

void BM_EffectiveChannelSerial(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::effective_channel(f.tensor, f.assignment));
  }
}
BENCHMARK(BM_EffectiveChannelSerial)->Unit(benchmark::kMillisecond);

void BM_TransmitDetect(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cfmimo::transmit_detect(f.g, f.w, f.payload, f.noise, 1.0));
  }
}
BENCHMARK(BM_TransmitDetect)->Unit(benchmark::kMillisecond);

void BM_TransmitDetectSerial(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::transmit_detect(f.g, f.w, f.payload, f.noise, 1.0));
  }
}
BENCHMARK(BM_TransmitDetectSerial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
