#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsma {

using cx = std::complex<double>;
using BitVec = std::vector<std::uint8_t>;

inline constexpr double pi = std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline BitVec random_bits(std::size_t n, std::mt19937_64& rng) {
  BitVec b(n);
  for (auto& v : b) v = static_cast<std::uint8_t>(rng() & 1u);
  return b;
}

inline std::size_t count_bit_errors(std::span<const std::uint8_t> a,
                                    std::span<const std::uint8_t> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("count_bit_errors: length mismatch");
  std::size_t e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e += (a[i] != b[i]);
  return e;
}

// Stateless 64-bit mixer, used wherever a fixed pseudo-random pattern is
// derived from indices (pilot polarities, interleaver seeds).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace rsma
