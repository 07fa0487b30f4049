// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

// One master seed fans out into independent named sub-streams (stage tag plus
// up to three indices, e.g. drop and subcarrier), so toggling one pipeline
// stage never perturbs the draws of another. All samplers are hand-rolled on
// top of mt19937_64 so that results are reproducible across standard
// libraries, not just across runs of the same binary.
class RngStream {
 public:
  RngStream(std::uint64_t master, std::string_view stage,
            std::uint64_t i0 = 0, std::uint64_t i1 = 0, std::uint64_t i2 = 0)
      : gen_(derive(master, stage, i0, i1, i2)) {}

  // uniform in (0,1); never hits an endpoint, safe under log()
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
  }

  double gaussian() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(2.0 * kPi * uniform());
  }

  // circularly-symmetric complex Gaussian with E|z|^2 = variance
  cplx cgaussian(double variance) {
    const double r   = std::sqrt(-variance * std::log(uniform()));
    const double phi = 2.0 * kPi * uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  // uniform integer in [0, bound), rejection sampled (no modulo bias)
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t max   = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    std::uint64_t x;
    do { x = gen_(); } while (x >= limit);
    return x % bound;
  }

  double exponential(double mean) { return -mean * std::log(uniform()); }

  int poisson(double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  static std::uint64_t derive(std::uint64_t master, std::string_view stage,
                              std::uint64_t i0, std::uint64_t i1, std::uint64_t i2) {
    std::uint64_t h = splitmix(master);
    h = splitmix(h ^ fnv1a(stage));
    h = splitmix(h ^ i0);
    h = splitmix(h ^ i1);
    h = splitmix(h ^ i2);
    return h;
  }

  std::mt19937_64 gen_;
};

}  // namespace cfmimo
