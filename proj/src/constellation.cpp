#include "rsma/constellation.hpp"

#include <array>
#include <limits>

namespace rsma {

int bits_per_symbol(Modulation m) {
  switch (m) {
    case Modulation::bpsk: return 1;
    case Modulation::qpsk: return 2;
    case Modulation::qam16: return 4;
  }
  throw std::invalid_argument("bits_per_symbol: bad modulation");
}

const char* to_string(Modulation m) {
  switch (m) {
    case Modulation::bpsk: return "BPSK";
    case Modulation::qpsk: return "QPSK";
    case Modulation::qam16: return "16QAM";
  }
  return "?";
}

Modulation modulation_from_string(const std::string& s) {
  if (s == "BPSK" || s == "bpsk") return Modulation::bpsk;
  if (s == "QPSK" || s == "qpsk") return Modulation::qpsk;
  if (s == "16QAM" || s == "16qam" || s == "QAM16" || s == "qam16")
    return Modulation::qam16;
  throw std::invalid_argument("unknown modulation: " + s);
}

namespace {

// Reflected-Gray amplitude for a 2-bit axis label: 00 01 11 10 -> -3 -1 +1 +3.
double gray2_level(unsigned b) {
  static constexpr std::array<double, 4> lut = {-3.0, -1.0, +3.0, +1.0};
  return lut[b & 3u];
}

}  // namespace

Constellation build_constellation(Modulation scheme) {
  Constellation c;
  c.scheme = scheme;
  c.m = bits_per_symbol(scheme);
  const std::size_t n = std::size_t{1} << c.m;
  c.points.resize(n);
  switch (scheme) {
    case Modulation::bpsk:
      c.points[0] = {+1.0, 0.0};
      c.points[1] = {-1.0, 0.0};
      break;
    case Modulation::qpsk: {
      const double a = 1.0 / std::sqrt(2.0);
      for (std::size_t i = 0; i < 4; ++i) {
        const double re = (i & 2u) ? -a : +a;  // first bit -> I sign
        const double im = (i & 1u) ? -a : +a;  // second bit -> Q sign
        c.points[i] = {re, im};
      }
      break;
    }
    case Modulation::qam16: {
      const double a = 1.0 / std::sqrt(10.0);
      for (std::size_t i = 0; i < 16; ++i) {
        const unsigned bi = static_cast<unsigned>(i >> 2);  // bits b0 b1 -> I
        const unsigned bq = static_cast<unsigned>(i & 3u);  // bits b2 b3 -> Q
        c.points[i] = {a * gray2_level(bi), a * gray2_level(bq)};
      }
      break;
    }
  }
  return c;
}

CompositeConstellation build_composite(cx g_c, cx g_p, const Constellation& xc,
                                       const Constellation& xp) {
  CompositeConstellation s;
  s.g_c = g_c;
  s.g_p = g_p;
  s.b_c = xc.m;
  s.b_p = xp.m;
  s.points.resize(xc.points.size() * xp.points.size());
  for (std::size_t lc = 0; lc < xc.points.size(); ++lc) {
    const cx common = g_c * xc.points[lc];
    for (std::size_t lp = 0; lp < xp.points.size(); ++lp)
      s.points[(lc << s.b_p) | lp] = common + g_p * xp.points[lp];
  }
  return s;
}

std::vector<cx> modulate(std::span<const std::uint8_t> bits,
                         const Constellation& c) {
  if (bits.size() % static_cast<std::size_t>(c.m) != 0)
    throw std::invalid_argument("modulate: bit count not divisible by m");
  std::vector<cx> out(bits.size() / static_cast<std::size_t>(c.m));
  for (std::size_t s = 0; s < out.size(); ++s) {
    std::size_t idx = 0;
    for (int b = 0; b < c.m; ++b)
      idx = (idx << 1) | (bits[s * static_cast<std::size_t>(c.m) +
                               static_cast<std::size_t>(b)] &
                          1u);
    out[s] = c.points[idx];
  }
  return out;
}

void maxlog_bit_llrs(cx y, std::span<const cx> points, int bits,
                     double noise_var, std::span<double> llrs) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double min0[8], min1[8];
  for (int b = 0; b < bits; ++b) min0[b] = min1[b] = inf;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = std::norm(y - points[i]);
    for (int b = 0; b < bits; ++b) {
      if ((i >> (bits - 1 - b)) & 1u) {
        if (d < min1[b]) min1[b] = d;
      } else {
        if (d < min0[b]) min0[b] = d;
      }
    }
  }
  for (int b = 0; b < bits; ++b)
    llrs[b] = (min1[b] - min0[b]) / noise_var;
}

std::size_t nearest_point(cx y, std::span<const cx> points) {
  std::size_t best = 0;
  double bd = std::norm(y - points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = std::norm(y - points[i]);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

}  // namespace rsma
