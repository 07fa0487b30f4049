// SPDX-License-Identifier: Apache-2.0
//
// Per-UE metrics (RMSSE, SE, SINR), order statistics, and the CDF/summary
// CSV emitter.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

// sqrt(sum_{v,t} |soft - sent|^2 / sum_{v,t} |sent|^2) per UE (matrix row).
std::vector<double> rmsse(const std::vector<Mat>& soft,
                          const std::vector<Mat>& sent);

// (1/n) sum log2(1 + sinr) over the per-subcarrier SINRs of one UE.
double spectral_efficiency(const std::vector<double>& sinr_linear);

struct MethodMetrics {
  std::vector<double> rmsse;    // one per (drop, UE)
  std::vector<double> se;       // one per (drop, UE), bits/s/Hz
  std::vector<double> sinr_db;  // one per (drop, UE, subcarrier)
};

struct MetricsReport {
  std::vector<std::string> methods;  // emission order
  std::map<std::string, MethodMetrics> per_method;
  int num_ues = 0;
  int num_subcarriers = 0;
  int num_drops = 0;

  // Diagnostics carried along for acceptance checks.
  long ia_pass2_regressions = 0;   // pass-2 objective drops (must stay 0)
  long chest_nonconverged = 0;     // FBS solves that hit max_iter
  std::vector<double> pilot_snr_db;  // per (drop, UE), chest modes only
};

// Sorted copy + type-7 (linear interpolation) quantile.
double quantile(std::vector<double> values, double q);
// Mean of the ceil(n/10) smallest values.
double bottom_decile_mean(std::vector<double> values);
double mean(const std::vector<double>& values);

// Sorted (value, rank/n) pairs.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

// Writes cdf_<metric>_<method>.csv for metric in {rmsse, se, sinr_db} plus
// summary.csv; returns the created paths.  Throws ConfigError on an empty
// method list and IoError on write failures.
std::vector<std::string> emit_cdfs(const MetricsReport& report,
                                   const std::string& out_dir);

}  // namespace cfmimo
