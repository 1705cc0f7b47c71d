#pragma once

#include "rsma/mcs.hpp"
#include "rsma/ofdm.hpp"

namespace rsma {

// Polar code geometry for one stream of one frame: a single wideband codeword
// of coded_len = data_cells * m bits, shortened from the next power-of-two
// mother code and passed through a fixed pseudo-random interleaver.
struct CodeConfig {
  std::size_t coded_len = 0;
  std::size_t info_len = 0;
  std::size_t mother_len = 0;
  std::size_t list_size = 8;
  std::vector<std::uint32_t> info_positions;   // sorted input indices
  std::vector<std::uint32_t> frozen_set;       // sorted, excludes shortening
  std::vector<std::uint32_t> shortening_set;   // tail [coded_len, mother_len)
  std::vector<std::uint32_t> interleaver;      // tx[i] = natural[interleaver[i]]
  std::vector<std::uint8_t> forced_zero;       // input mask: frozen or shortened
};

// Frozen sets come from Gaussian-approximation density evolution at a fixed
// design Es/N0 of 3 dB; shortened mother-code outputs are the tail positions,
// which the encoder forces to zero and the decoder treats as known.
CodeConfig build_code_config(const Mcs& mcs, const FrameGeometry& geom,
                             std::size_t list_size = 8);

BitVec polar_encode(std::span<const std::uint8_t> info, const CodeConfig& cfg);

// Successive-cancellation list decode (list size from cfg; 1 selects plain
// SC). LLR convention: positive favors bit 0. Returns the info-bit estimate;
// success accounting against the transmitted bits is the caller's job.
BitVec polar_decode(std::span<const double> llrs, const CodeConfig& cfg);

// GF(2) transform x = u * F^{(x)n} in natural bit order. The transform is an
// involution, which the decoder uses to recover u from a re-encoded codeword.
void polar_transform_inplace(std::span<std::uint8_t> bits);

std::vector<std::uint32_t> inverse_permutation(
    std::span<const std::uint32_t> perm);

}  // namespace rsma
