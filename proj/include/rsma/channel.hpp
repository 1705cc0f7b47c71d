#pragma once

#include "rsma/ofdm.hpp"

namespace rsma {

// Target first-order statistics for a generated two-user channel pair.
// alpha_db = 10 log10(|h2|^2 / |h1|^2); rho = 1 - |h1^H h2| / (|h1| |h2|),
// 0 aligned, 1 orthogonal.
struct ScenarioTarget {
  double alpha_db = 0.0;
  double rho = 0.5;
  std::size_t taps = 4;
  std::uint64_t seed = 0;
  // Exponential power-delay-profile decay rate; tap l carries e^{-decay*l}
  // (normalized). Larger values mean a flatter, bench-like channel.
  double pdp_decay = 2.0;
};

// The six measured lab cases.
ScenarioTarget case_target(int case_index);

// Per-subcarrier 2x1 channels for both users (y_k[n] = h_k[n]^H x[n]) plus the
// cell noise variance. Entries cover all FFT bins.
struct ChannelRealization {
  std::vector<std::array<cx, 2>> h1;
  std::vector<std::array<cx, 2>> h2;
  double sigma2 = 1.0;
};

// Draws user-1 from an L-tap exponential-profile delay line and shapes user-2
// per subcarrier to hit the alpha/rho targets exactly on every realization.
ChannelRealization generate_channel_pair(const ScenarioTarget& target,
                                         const FrameGeometry& geom,
                                         double sigma2, std::mt19937_64& rng);

// Builds a realization directly from per-antenna tap vectors (taps must fit
// the CP). Used by the time-domain path and tests.
ChannelRealization realization_from_taps(
    const std::array<std::vector<cx>, 2>& taps_user1,
    const std::array<std::vector<cx>, 2>& taps_user2, double sigma2,
    const FrameGeometry& geom);

// Frequency-domain fast path: y_k[sym][n] = h_k[n]^H x[sym][n] + CN(0, sigma2)
// per cell. Noise draw order is user 1 first, cells row-major.
std::pair<RxGrid, RxGrid> apply_channel(const TxGrid& grid,
                                        const ChannelRealization& ch,
                                        std::mt19937_64& rng);

// Time-domain path: IFFT/CP samples convolved with the tap responses, AWGN per
// sample, then CP removal and FFT. Agrees with the fast path (noiselessly)
// whenever the taps fit inside the CP.
std::pair<RxGrid, RxGrid> apply_channel_time(
    const TxGrid& grid, const std::array<std::vector<cx>, 2>& taps_user1,
    const std::array<std::vector<cx>, 2>& taps_user2, double sigma2,
    std::mt19937_64& rng, const FrameGeometry& geom);

// Empirical channel statistics, averaged per subcarrier over the given spans.
double measure_alpha(std::span<const std::array<cx, 2>> h1,
                     std::span<const std::array<cx, 2>> h2);
double measure_rho(std::span<const std::array<cx, 2>> h1,
                   std::span<const std::array<cx, 2>> h2);

// Convenience: restrict a full-bin channel to the data subcarriers, the set
// the receivers actually use and the set alpha/rho are measured on.
std::vector<std::array<cx, 2>> data_bin_channel(
    std::span<const std::array<cx, 2>> h, const FrameGeometry& geom);

}  // namespace rsma
