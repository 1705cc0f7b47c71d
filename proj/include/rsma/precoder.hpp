#pragma once

#include <array>

#include "rsma/common.hpp"

namespace rsma {

// Linear precoders for the three streams. Unit total transmit power:
// |p_c|^2 + |p_1|^2 + |p_2|^2 = 1 with |p_c|^2 = common_power_fraction.
struct PrecoderSet {
  std::array<cx, 2> p_c{cx{0.0, 0.0}, cx{0.0, 0.0}};
  std::array<cx, 2> p_1{cx{0.0, 0.0}, cx{0.0, 0.0}};
  std::array<cx, 2> p_2{cx{0.0, 0.0}, cx{0.0, 0.0}};
  double common_power_fraction = 0.0;
  // Set when the zero-forcing step hit a near-singular channel pair and fell
  // back to matched filtering.
  bool zf_fallback = false;
};

inline cx dot_hx(const std::array<cx, 2>& h, const std::array<cx, 2>& x) {
  return std::conj(h[0]) * x[0] + std::conj(h[1]) * x[1];
}

inline double norm2(const std::array<cx, 2>& v) {
  return std::norm(v[0]) + std::norm(v[1]);
}

}  // namespace rsma
