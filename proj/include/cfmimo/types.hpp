// SPDX-License-Identifier: Apache-2.0
//
// cfmimo: link-level simulator for the cell-free mmWave massive MU-MIMO uplink
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cfmimo {

using cplx = std::complex<double>;
using Mat  = Eigen::MatrixXcd;
using Vec  = Eigen::VectorXcd;

inline constexpr double kPi             = 3.14159265358979323846;
inline constexpr double kSpeedOfLight   = 299792458.0;  // m/s
inline constexpr double kThermalNoiseDbmHz = -174.0;    // dBm/Hz

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x)  { return 10.0 * std::log10(x); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w)   { return 10.0 * std::log10(w) + 30.0; }

// Antenna bookkeeping shared by every matrix constructor: the receive side
// stacks num_aps blocks of ap_antennas rows, the transmit side num_ues blocks
// of ue_antennas columns.
struct Dims {
  int num_aps{};
  int num_ues{};
  int ap_antennas{};
  int ue_antennas{};

  int rx() const { return num_aps * ap_antennas; }
  int tx() const { return num_ues * ue_antennas; }
  bool operator==(const Dims&) const = default;
};

struct ConfigError : std::runtime_error { using std::runtime_error::runtime_error; };
struct ZeroChannel : std::runtime_error { using std::runtime_error::runtime_error; };
struct DelayTooLarge : std::runtime_error { using std::runtime_error::runtime_error; };
struct DegenerateChannel : std::runtime_error { using std::runtime_error::runtime_error; };
struct CombinatorialBudgetExceeded : std::runtime_error { using std::runtime_error::runtime_error; };
struct ClusterSizeMismatch : std::runtime_error { using std::runtime_error::runtime_error; };
struct SingularGram : std::runtime_error { using std::runtime_error::runtime_error; };
struct IoError : std::runtime_error { using std::runtime_error::runtime_error; };

}  // namespace cfmimo
