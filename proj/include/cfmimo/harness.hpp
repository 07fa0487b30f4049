// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo experiment orchestration: drops, method comparison under
// genie/estimated channel knowledge, metric aggregation, CSV emission, and
// the tiny-instance oracle suite.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfmimo/codebook.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/metrics.hpp"

namespace cfmimo {

enum class ChestMode {
  genie,        // ground-truth channels everywhere
  pre_ba_only,  // estimated surrogate for BA, genie equalizer channel
  full,         // estimated surrogate + estimated equalizer channel
};

std::string chest_mode_name(ChestMode m);
ChestMode parse_chest_mode(const std::string& name);  // throws ConfigError

struct ExperimentSpec {
  Scenario scenario;
  std::vector<BaMethod> methods;
  ChestMode chest_mode = ChestMode::genie;
  int num_drops = 1;
  int data_slots = 16;  // T_D
  std::uint64_t seed = 0;  // 0 = take the scenario's seed
  std::string out_dir;     // empty = keep results in memory only
  std::string channels_path;  // optional imported tensor (single drop)
  bool dump_beams = false;
  bool dump_chest = false;
  std::uint64_t max_combinations = 1ull << 20;  // exhaustive method guard

  void validate() const;
};

// Runs the full pipeline per drop — geometry, channels, power control,
// (estimated or genie) surrogate, beam alignment per method, (estimated or
// genie) equalizer channel, LMMSE, QPSK transmission — and aggregates
// metrics.  All methods within a drop share the channel realization, the
// payload, and every noise draw; results are independent of thread count.
MetricsReport run_experiment(const ExperimentSpec& spec);

// Cross-checks the core algebra against brute-force oracles on small random
// instances, printing one line per check.  Returns the number of failures.
int run_oracle_suite(std::ostream& out, std::uint64_t seed = 7);

}  // namespace cfmimo
