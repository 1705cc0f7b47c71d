#pragma once

#include "rsma/constellation.hpp"

namespace rsma {

// One row of the 6-entry MCS grid: modulation order and code rate.
struct Mcs {
  Modulation mod = Modulation::bpsk;
  int rate_num = 1;
  int rate_den = 2;
};

inline constexpr int kMcsCount = 6;

inline Mcs mcs_from_index(int idx) {
  switch (idx) {
    case 0: return {Modulation::bpsk, 1, 2};
    case 1: return {Modulation::bpsk, 3, 4};
    case 2: return {Modulation::qpsk, 1, 2};
    case 3: return {Modulation::qpsk, 3, 4};
    case 4: return {Modulation::qam16, 1, 2};
    case 5: return {Modulation::qam16, 3, 4};
  }
  throw std::invalid_argument("mcs_from_index: index must be 0..5");
}

inline double code_rate(const Mcs& m) {
  return static_cast<double>(m.rate_num) / static_cast<double>(m.rate_den);
}

// Nominal wideband stream rate R(m, r) = B_eff * m * r in bits per second.
inline double nominal_rate_bps(const Mcs& m, double effective_bandwidth_hz) {
  return effective_bandwidth_hz * bits_per_symbol(m.mod) * code_rate(m);
}

// Per-stream MCS selection: common stream and the two private streams.
struct McsGroup {
  int common = 3;
  int p1 = 2;
  int p2 = 2;
};

}  // namespace rsma
