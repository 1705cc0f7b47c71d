#pragma once

#include "rsma/common.hpp"

namespace rsma {

enum class Modulation { bpsk, qpsk, qam16 };

int bits_per_symbol(Modulation m);
const char* to_string(Modulation m);
Modulation modulation_from_string(const std::string& s);

// Gray-labeled unit-average-energy alphabet. points[i] is the symbol whose
// label is the m-bit big-endian expansion of i, so the label table is implicit
// in the point order. The exact Gray tables are documented in the README.
struct Constellation {
  Modulation scheme = Modulation::bpsk;
  int m = 0;  // bits per symbol
  std::vector<cx> points;
};

Constellation build_constellation(Modulation scheme);

// Joint alphabet {g_c*x_c + g_p*x_p}. A point's index carries the common label
// in the high b_c bits and the private label in the low b_p bits.
struct CompositeConstellation {
  cx g_c{0.0, 0.0};
  cx g_p{0.0, 0.0};
  int b_c = 0;
  int b_p = 0;
  std::vector<cx> points;
};

CompositeConstellation build_composite(cx g_c, cx g_p, const Constellation& xc,
                                       const Constellation& xp);

// Maps bits (m per symbol, big-endian within a symbol) to points.
std::vector<cx> modulate(std::span<const std::uint8_t> bits,
                         const Constellation& c);

// Max-log bit LLRs over a label-ordered alphabet of 2^bits points with noise
// variance noise_var (total complex variance). llrs[i] > 0 favors bit i = 0;
// bit 0 is the most significant label bit. This one sign convention is used by
// every demapper and by the polar decoder.
void maxlog_bit_llrs(cx y, std::span<const cx> points, int bits,
                     double noise_var, std::span<double> llrs);

std::size_t nearest_point(cx y, std::span<const cx> points);

}  // namespace rsma
