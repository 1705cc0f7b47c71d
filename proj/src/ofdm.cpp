#include "rsma/ofdm.hpp"

#include <algorithm>

namespace rsma {

namespace detail {

void fft(std::span<cx> a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const cx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cx w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cx u = a[i + j];
        const cx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : a) v *= s;
}

}  // namespace detail

FrameGeometry FrameGeometry::standard() {
  FrameGeometry g;
  // Active logical subcarriers -26..-1, 1..26; pilots at +-7 and +-21.
  const int pilots[4] = {-21, -7, 7, 21};
  auto is_pilot = [&](int k) {
    return k == pilots[0] || k == pilots[1] || k == pilots[2] || k == pilots[3];
  };
  auto to_bin = [&](int k) {
    return static_cast<std::size_t>((k + 64) % 64);
  };
  for (int k = -26; k <= 26; ++k) {
    if (k == 0) continue;
    if (is_pilot(k))
      g.pilot_bins.push_back(to_bin(k));
    else
      g.data_bins.push_back(to_bin(k));
  }
  return g;
}

double preamble_value(std::size_t antenna, std::size_t bin) {
  const std::uint64_t key = 0xA5u * 1024 + antenna * 64 + bin;
  return (splitmix64(key) & 1u) ? 1.0 : -1.0;
}

double pilot_value(std::size_t payload_symbol, std::size_t bin) {
  const std::uint64_t key = 0x50u * 65536 + payload_symbol * 64 + bin;
  return (splitmix64(key) & 1u) ? 1.0 : -1.0;
}

TxGrid make_tx_grid(const FrameGeometry& geom) {
  TxGrid g;
  g.n_symbols = geom.frame_symbols();
  g.n_bins = geom.n_total;
  g.ant[0].assign(g.n_symbols * g.n_bins, cx{0.0, 0.0});
  g.ant[1].assign(g.n_symbols * g.n_bins, cx{0.0, 0.0});
  return g;
}

RxGrid make_rx_grid(const FrameGeometry& geom) {
  RxGrid g;
  g.n_symbols = geom.frame_symbols();
  g.n_bins = geom.n_total;
  g.cells.assign(g.n_symbols * g.n_bins, cx{0.0, 0.0});
  return g;
}

namespace {

TxGrid assemble_impl(std::span<const cx> sc, std::span<const cx> s1,
                     std::span<const cx> s2, const PrecoderSet* wideband,
                     std::span<const PrecoderSet> per_sc,
                     const FrameGeometry& geom) {
  const std::size_t cells = geom.data_cells();
  if (sc.size() != cells || s1.size() != cells || s2.size() != cells)
    throw std::invalid_argument("assemble_grid: stream length mismatch");
  if (!wideband && per_sc.size() != geom.n_data)
    throw std::invalid_argument("assemble_grid: need one precoder per data bin");

  TxGrid grid = make_tx_grid(geom);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t bin : geom.data_bins)
      grid.at(a, a, bin) = preamble_value(a, bin);
    for (std::size_t bin : geom.pilot_bins)
      grid.at(a, a, bin) = preamble_value(a, bin);
  }
  for (std::size_t sym = 0; sym < geom.payload_symbols; ++sym) {
    const std::size_t row = geom.preamble_symbols + sym;
    for (std::size_t di = 0; di < geom.n_data; ++di) {
      const PrecoderSet& p = wideband ? *wideband : per_sc[di];
      const std::size_t s = sym * geom.n_data + di;
      const std::size_t bin = geom.data_bins[di];
      for (std::size_t a = 0; a < 2; ++a)
        grid.at(a, row, bin) =
            p.p_c[a] * sc[s] + p.p_1[a] * s1[s] + p.p_2[a] * s2[s];
    }
    const std::size_t ant = sym & 1u;
    for (std::size_t bin : geom.pilot_bins)
      grid.at(ant, row, bin) = pilot_value(sym, bin);
  }
  return grid;
}

}  // namespace

TxGrid assemble_grid(std::span<const cx> sc, std::span<const cx> s1,
                     std::span<const cx> s2, const PrecoderSet& pre,
                     const FrameGeometry& geom) {
  return assemble_impl(sc, s1, s2, &pre, {}, geom);
}

TxGrid assemble_grid(std::span<const cx> sc, std::span<const cx> s1,
                     std::span<const cx> s2,
                     std::span<const PrecoderSet> precoders,
                     const FrameGeometry& geom) {
  return assemble_impl(sc, s1, s2, nullptr, precoders, geom);
}

std::array<std::vector<cx>, 2> ofdm_modulate(const TxGrid& grid,
                                             const FrameGeometry& geom) {
  if (grid.n_symbols != geom.frame_symbols() || grid.n_bins != geom.n_total)
    throw std::invalid_argument("ofdm_modulate: grid shape mismatch");
  std::array<std::vector<cx>, 2> out;
  std::vector<cx> buf(geom.n_total);
  for (std::size_t a = 0; a < 2; ++a) {
    out[a].resize(geom.frame_samples());
    for (std::size_t sym = 0; sym < grid.n_symbols; ++sym) {
      std::copy_n(grid.ant[a].begin() + static_cast<std::ptrdiff_t>(sym * geom.n_total),
                  geom.n_total, buf.begin());
      detail::fft(buf, /*inverse=*/true);
      cx* dst = out[a].data() + sym * geom.symbol_samples();
      for (std::size_t i = 0; i < geom.cp_len; ++i)
        dst[i] = buf[geom.n_total - geom.cp_len + i];
      std::copy(buf.begin(), buf.end(), dst + geom.cp_len);
    }
  }
  return out;
}

RxGrid ofdm_demodulate(std::span<const cx> samples, const FrameGeometry& geom) {
  if (samples.size() != geom.frame_samples())
    throw std::invalid_argument("ofdm_demodulate: sample count mismatch");
  RxGrid grid = make_rx_grid(geom);
  std::vector<cx> buf(geom.n_total);
  for (std::size_t sym = 0; sym < grid.n_symbols; ++sym) {
    const cx* src = samples.data() + sym * geom.symbol_samples() + geom.cp_len;
    std::copy_n(src, geom.n_total, buf.begin());
    detail::fft(buf, /*inverse=*/false);
    std::copy(buf.begin(), buf.end(),
              grid.cells.begin() + static_cast<std::ptrdiff_t>(sym * geom.n_total));
  }
  return grid;
}

ChannelEstimate estimate_channel(const RxGrid& rx, const FrameGeometry& geom) {
  if (rx.n_symbols != geom.frame_symbols() || rx.n_bins != geom.n_total)
    throw std::invalid_argument("estimate_channel: grid shape mismatch");
  ChannelEstimate est;
  est.h_hat.assign(geom.n_total, {cx{0.0, 0.0}, cx{0.0, 0.0}});

  double preamble_energy = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    auto ls_at = [&](std::size_t bin) {
      const cx y = rx.at(a, bin);
      preamble_energy += std::norm(y);
      // y = conj(h_a) * preamble  =>  h_a = conj(y / preamble)
      est.h_hat[bin][a] = std::conj(y / preamble_value(a, bin));
    };
    for (std::size_t bin : geom.data_bins) ls_at(bin);
    for (std::size_t bin : geom.pilot_bins) ls_at(bin);
  }
  if (preamble_energy == 0.0)
    throw std::invalid_argument("estimate_channel: degenerate (zero) pilots");

  double res = 0.0;
  std::size_t n = 0;
  for (std::size_t sym = 0; sym < geom.payload_symbols; ++sym) {
    const std::size_t row = geom.preamble_symbols + sym;
    const std::size_t ant = sym & 1u;
    for (std::size_t bin : geom.pilot_bins) {
      const cx pred = std::conj(est.h_hat[bin][ant]) * pilot_value(sym, bin);
      res += std::norm(rx.at(row, bin) - pred);
      ++n;
    }
  }
  // The preamble LS error contributes the same variance as the cell noise.
  est.sigma2_hat = std::max(res / (2.0 * static_cast<double>(n)), 1e-30);
  return est;
}

}  // namespace rsma
