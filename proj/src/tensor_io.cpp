// SPDX-License-Identifier: Apache-2.0
//
// Versioned binary container for channel tensors.  Layout (little-endian):
//   "CFMT" | u32 version | u32 dtype (0=c128, 1=c64) | u32 dims[5]
//   (n_sc, L, K, n_AP, n_UE) | u64 seed | u64 config_hash | payload,
// payload = per subcarrier, row-major (re, im) pairs.
#include <cstring>
#include <fstream>
#include <vector>

#include "cfmimo/channel.hpp"

namespace cfmimo {

namespace {

constexpr char kMagic[4] = {'C', 'F', 'M', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
T take(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  return value;
}

}  // namespace

void save_tensor(const std::string& path, const ChannelTensor& tensor,
                 std::uint64_t seed, std::uint64_t config_hash,
                 bool single_precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, single_precision ? 1 : 0);
  const Dims& d = tensor.dims;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.num_subcarriers));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.num_aps));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.num_ues));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.ap_antennas));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.ue_antennas));
  put<std::uint64_t>(out, seed);
  put<std::uint64_t>(out, config_hash);

  for (const Mat& h : tensor.per_subcarrier) {
    for (int r = 0; r < h.rows(); ++r) {
      for (int c = 0; c < h.cols(); ++c) {
        if (single_precision) {
          put<float>(out, static_cast<float>(h(r, c).real()));
          put<float>(out, static_cast<float>(h(r, c).imag()));
        } else {
          put<double>(out, h(r, c).real());
          put<double>(out, h(r, c).imag());
        }
      }
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

LoadedTensor load_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("not a channel tensor file: " + path);
  }
  const auto version = take<std::uint32_t>(in);
  if (version != kVersion) {
    throw IoError("unsupported tensor file version " + std::to_string(version));
  }
  const auto dtype = take<std::uint32_t>(in);
  if (dtype > 1) throw IoError("unknown tensor dtype " + std::to_string(dtype));

  LoadedTensor lt;
  ChannelTensor& t = lt.tensor;
  t.num_subcarriers = static_cast<int>(take<std::uint32_t>(in));
  t.dims.num_aps = static_cast<int>(take<std::uint32_t>(in));
  t.dims.num_ues = static_cast<int>(take<std::uint32_t>(in));
  t.dims.ap_antennas = static_cast<int>(take<std::uint32_t>(in));
  t.dims.ue_antennas = static_cast<int>(take<std::uint32_t>(in));
  lt.seed = take<std::uint64_t>(in);
  lt.config_hash = take<std::uint64_t>(in);
  if (!in) throw IoError("truncated tensor header: " + path);
  if (t.num_subcarriers < 1 || t.dims.num_aps < 1 || t.dims.num_ues < 1 ||
      t.dims.ap_antennas < 1 || t.dims.ue_antennas < 1) {
    throw IoError("invalid tensor dimensions in " + path);
  }

  t.per_subcarrier.assign(t.num_subcarriers, Mat(t.dims.rx(), t.dims.tx()));
  for (Mat& h : t.per_subcarrier) {
    for (int r = 0; r < h.rows(); ++r) {
      for (int c = 0; c < h.cols(); ++c) {
        double re, im;
        if (dtype == 1) {
          re = take<float>(in);
          im = take<float>(in);
        } else {
          re = take<double>(in);
          im = take<double>(in);
        }
        h(r, c) = cplx(re, im);
      }
    }
  }
  if (!in) throw IoError("truncated tensor payload: " + path);
  return lt;
}

}  // namespace cfmimo
