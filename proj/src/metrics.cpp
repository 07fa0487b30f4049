// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace cfmimo {

std::vector<double> rmsse(const std::vector<Mat>& soft,
                          const std::vector<Mat>& sent) {
  if (soft.size() != sent.size() || soft.empty()) {
    throw ConfigError("rmsse: shape mismatch");
  }
  const Eigen::Index K = sent[0].rows();
  std::vector<double> num(K, 0.0), den(K, 0.0);
  for (std::size_t v = 0; v < sent.size(); ++v) {
    if (soft[v].rows() != K || soft[v].cols() != sent[v].cols()) {
      throw ConfigError("rmsse: shape mismatch");
    }
    for (Eigen::Index k = 0; k < K; ++k) {
      num[k] += (soft[v].row(k) - sent[v].row(k)).squaredNorm();
      den[k] += sent[v].row(k).squaredNorm();
    }
  }
  std::vector<double> out(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    out[k] = den[k] > 0.0 ? std::sqrt(num[k] / den[k]) : 0.0;
  }
  return out;
}

double spectral_efficiency(const std::vector<double>& sinr_linear) {
  if (sinr_linear.empty()) return 0.0;
  double s = 0.0;
  for (double x : sinr_linear) s += std::log2(1.0 + x);
  return s / static_cast<double>(sinr_linear.size());
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of empty list");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double bottom_decile_mean(std::vector<double> values) {
  if (values.empty()) throw ConfigError("bottom decile of empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = (values.size() + 9) / 10;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += values[i];
  return s / static_cast<double>(n);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("mean of empty list");
  double s = 0.0;
  for (double x : values) s += x;
  return s / static_cast<double>(values.size());
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(values.size());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

namespace {

void write_cdf_file(const std::string& path, const std::string& metric,
                    const std::string& method, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[64];
  out << "# cfmimo-cdf v1 metric=" << metric << " method=" << method
      << " n=" << values.size() << "\n";
  out << "value,cdf\n";
  for (const auto& [v, c] : empirical_cdf(values)) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", v, c);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

std::vector<std::string> emit_cdfs(const MetricsReport& report,
                                   const std::string& out_dir) {
  if (report.methods.empty()) {
    throw ConfigError("no methods selected; nothing to emit");
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> created;

  for (const std::string& m : report.methods) {
    const MethodMetrics& mm = report.per_method.at(m);
    const std::vector<std::pair<std::string, const std::vector<double>*>> metrics =
        {{"rmsse", &mm.rmsse}, {"se", &mm.se}, {"sinr_db", &mm.sinr_db}};
    for (const auto& [name, vals] : metrics) {
      const std::string path = out_dir + "/cdf_" + name + "_" + m + ".csv";
      write_cdf_file(path, name, m, *vals);
      created.push_back(path);
    }
  }

  const std::string summary_path = out_dir + "/summary.csv";
  std::ofstream out(summary_path);
  if (!out) throw IoError("cannot write " + summary_path);
  out << "# cfmimo-summary v1\n";
  out << "method,metric,count,mean,p10,p50,p90,bottom_decile_mean\n";
  char buf[256];
  for (const std::string& m : report.methods) {
    const MethodMetrics& mm = report.per_method.at(m);
    const std::vector<std::pair<std::string, const std::vector<double>*>> metrics =
        {{"rmsse", &mm.rmsse}, {"se", &mm.se}, {"sinr_db", &mm.sinr_db}};
    for (const auto& [name, vals] : metrics) {
      std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                    m.c_str(), name.c_str(), vals->size(), mean(*vals),
                    quantile(*vals, 0.1), quantile(*vals, 0.5),
                    quantile(*vals, 0.9), bottom_decile_mean(*vals));
      out << buf;
    }
  }
  if (!out) throw IoError("write failed: " + summary_path);
  created.push_back(summary_path);
  return created;
}

}  // namespace cfmimo
