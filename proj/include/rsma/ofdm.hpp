#pragma once

#include <array>

#include "rsma/common.hpp"
#include "rsma/precoder.hpp"

namespace rsma {

// 64-subcarrier numerology: 48 data + 4 comb pilots + 12 guards (11 edge
// carriers plus DC), 16-sample CP, 40 payload symbols. Two known preamble
// symbols lead the frame, one per transmit antenna, for per-antenna channel
// estimation.
struct FrameGeometry {
  std::size_t n_total = 64;
  std::size_t n_data = 48;
  std::size_t n_pilot = 4;
  std::size_t n_guard = 12;
  std::size_t cp_len = 16;
  std::size_t payload_symbols = 40;
  std::size_t preamble_symbols = 2;
  double subcarrier_spacing_hz = 312.5e3;
  double effective_bandwidth_hz = 12.0e6;

  std::vector<std::size_t> data_bins;   // FFT bin indices, fixed order
  std::vector<std::size_t> pilot_bins;  // FFT bin indices

  static FrameGeometry standard();

  std::size_t data_cells() const { return n_data * payload_symbols; }
  std::size_t frame_symbols() const { return preamble_symbols + payload_symbols; }
  std::size_t symbol_samples() const { return n_total + cp_len; }
  std::size_t frame_samples() const { return frame_symbols() * symbol_samples(); }
};

// Deterministic +/-1 patterns for the preamble and the comb pilots.
double preamble_value(std::size_t antenna, std::size_t bin);
double pilot_value(std::size_t payload_symbol, std::size_t bin);

struct TxGrid {
  std::size_t n_symbols = 0;
  std::size_t n_bins = 0;
  std::array<std::vector<cx>, 2> ant;

  cx& at(std::size_t a, std::size_t sym, std::size_t bin) {
    return ant[a][sym * n_bins + bin];
  }
  cx at(std::size_t a, std::size_t sym, std::size_t bin) const {
    return ant[a][sym * n_bins + bin];
  }
};

struct RxGrid {
  std::size_t n_symbols = 0;
  std::size_t n_bins = 0;
  std::vector<cx> cells;

  cx& at(std::size_t sym, std::size_t bin) { return cells[sym * n_bins + bin]; }
  cx at(std::size_t sym, std::size_t bin) const {
    return cells[sym * n_bins + bin];
  }
};

TxGrid make_tx_grid(const FrameGeometry& geom);
RxGrid make_rx_grid(const FrameGeometry& geom);

// Writes the three precoded streams onto the data subcarriers (cell order:
// payload symbol major, data bin minor), the comb pilots (antenna alternating
// with symbol parity), and the two per-antenna preamble symbols. Guard bins
// stay zero.
TxGrid assemble_grid(std::span<const cx> common_syms,
                     std::span<const cx> private1_syms,
                     std::span<const cx> private2_syms, const PrecoderSet& pre,
                     const FrameGeometry& geom);

// Per-data-subcarrier precoding variant; precoders.size() must equal n_data.
TxGrid assemble_grid(std::span<const cx> common_syms,
                     std::span<const cx> private1_syms,
                     std::span<const cx> private2_syms,
                     std::span<const PrecoderSet> precoders,
                     const FrameGeometry& geom);

// Unitary 64-point IFFT per symbol plus cyclic prefix. Output length is
// frame_symbols * (n_total + cp_len) per antenna.
std::array<std::vector<cx>, 2> ofdm_modulate(const TxGrid& grid,
                                             const FrameGeometry& geom);

// CP removal + unitary FFT; exact inverse of ofdm_modulate without a channel.
RxGrid ofdm_demodulate(std::span<const cx> samples, const FrameGeometry& geom);

// Per-user channel estimate: h_hat[bin] is the 2x1 channel in the y = h^H x
// convention, valid on active (data+pilot) bins; sigma2_hat is the estimated
// per-cell complex noise variance.
struct ChannelEstimate {
  std::vector<std::array<cx, 2>> h_hat;
  double sigma2_hat = 0.0;
};

// Least-squares per-antenna estimate from the preamble symbols; noise variance
// from comb-pilot residuals over the payload (halved: the residual carries the
// preamble estimation error on top of the cell noise).
ChannelEstimate estimate_channel(const RxGrid& rx, const FrameGeometry& geom);

namespace detail {
// In-place radix-2 FFT, unitary scaling in both directions.
void fft(std::span<cx> a, bool inverse);
}  // namespace detail

}  // namespace rsma
