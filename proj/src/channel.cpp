#include "rsma/channel.hpp"

#include <algorithm>

namespace rsma {

ScenarioTarget case_target(int case_index) {
  switch (case_index) {
    case 1: return {-1.34, 0.28, 4, 0};
    case 2: return {-1.63, 0.52, 4, 0};
    case 3: return {-1.19, 0.81, 4, 0};
    case 4: return {-11.74, 0.19, 4, 0};
    case 5: return {-11.87, 0.49, 4, 0};
    case 6: return {-11.52, 0.79, 4, 0};
  }
  throw std::invalid_argument("case_target: case index must be 1..6");
}

namespace {

// Exponential power-delay profile, unit total power per antenna element.
std::vector<double> pdp(std::size_t taps, double decay) {
  std::vector<double> p(taps);
  double sum = 0.0;
  for (std::size_t l = 0; l < taps; ++l) {
    p[l] = std::exp(-decay * static_cast<double>(l));
    sum += p[l];
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::array<std::vector<cx>, 2> draw_taps(std::size_t taps, double decay,
                                         std::mt19937_64& rng) {
  const auto prof = pdp(taps, decay);
  std::normal_distribution<double> n(0.0, 1.0);
  std::array<std::vector<cx>, 2> t;
  for (std::size_t a = 0; a < 2; ++a) {
    t[a].resize(taps);
    for (std::size_t l = 0; l < taps; ++l) {
      const double s = std::sqrt(prof[l] / 2.0);
      t[a][l] = cx{s * n(rng), s * n(rng)};
    }
  }
  return t;
}

// Frequency response C[n] = sum_l c[l] e^{-j 2 pi n l / N}; the stored channel
// is h[n] = conj(C[n]) so that y = h^H x matches y = C x.
std::vector<std::array<cx, 2>> taps_to_bins(
    const std::array<std::vector<cx>, 2>& taps, std::size_t n_bins) {
  std::vector<std::array<cx, 2>> h(n_bins);
  for (std::size_t n = 0; n < n_bins; ++n) {
    for (std::size_t a = 0; a < 2; ++a) {
      cx c{0.0, 0.0};
      for (std::size_t l = 0; l < taps[a].size(); ++l) {
        const double ang = -2.0 * pi * static_cast<double>(n) *
                           static_cast<double>(l) / static_cast<double>(n_bins);
        c += taps[a][l] * cx{std::cos(ang), std::sin(ang)};
      }
      h[n][a] = std::conj(c);
    }
  }
  return h;
}

std::array<cx, 2> unit(const std::array<cx, 2>& v) {
  const double n = std::sqrt(norm2(v));
  return {v[0] / n, v[1] / n};
}

// A deterministic vector orthogonal to u (Hermitian inner product).
std::array<cx, 2> perp(const std::array<cx, 2>& u) {
  return {-std::conj(u[1]), std::conj(u[0])};
}

}  // namespace

ChannelRealization realization_from_taps(
    const std::array<std::vector<cx>, 2>& taps_user1,
    const std::array<std::vector<cx>, 2>& taps_user2, double sigma2,
    const FrameGeometry& geom) {
  ChannelRealization ch;
  ch.h1 = taps_to_bins(taps_user1, geom.n_total);
  ch.h2 = taps_to_bins(taps_user2, geom.n_total);
  ch.sigma2 = sigma2;
  return ch;
}

ChannelRealization generate_channel_pair(const ScenarioTarget& target,
                                         const FrameGeometry& geom,
                                         double sigma2, std::mt19937_64& rng) {
  if (target.rho < 0.0 || target.rho > 1.0)
    throw std::invalid_argument("generate_channel_pair: rho must be in [0,1]");
  if (target.taps < 1 || target.taps > geom.cp_len)
    throw std::invalid_argument("generate_channel_pair: taps must be 1..cp_len");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("generate_channel_pair: sigma2 must be > 0");

  if (!(target.pdp_decay >= 0.0))
    throw std::invalid_argument("generate_channel_pair: bad pdp_decay");
  const auto t1 = draw_taps(target.taps, target.pdp_decay, rng);
  const auto t2 = draw_taps(target.taps, target.pdp_decay, rng);
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * pi);
  const double phase = uphase(rng);
  const cx align = cx{std::cos(phase), std::sin(phase)};

  ChannelRealization ch;
  ch.sigma2 = sigma2;
  ch.h1 = taps_to_bins(t1, geom.n_total);
  const auto raw2 = taps_to_bins(t2, geom.n_total);
  ch.h2.resize(geom.n_total);

  const double c = 1.0 - target.rho;
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double scale = std::pow(10.0, target.alpha_db / 20.0);
  for (std::size_t n = 0; n < geom.n_total; ++n) {
    const double n1 = std::sqrt(norm2(ch.h1[n]));
    const auto u1 = unit(ch.h1[n]);
    // Residual of the raw user-2 draw orthogonal to u1 keeps the frequency
    // correlation of the delay line.
    const cx proj = dot_hx(u1, raw2[n]);
    std::array<cx, 2> r{raw2[n][0] - proj * u1[0], raw2[n][1] - proj * u1[1]};
    if (norm2(r) < 1e-24) r = perp(u1);
    const auto up = unit(r);
    for (std::size_t a = 0; a < 2; ++a)
      ch.h2[n][a] = scale * n1 * (c * align * u1[a] + s * up[a]);
  }
  return ch;
}

std::pair<RxGrid, RxGrid> apply_channel(const TxGrid& grid,
                                        const ChannelRealization& ch,
                                        std::mt19937_64& rng) {
  if (ch.h1.size() != grid.n_bins || ch.h2.size() != grid.n_bins)
    throw std::invalid_argument("apply_channel: channel/grid bin mismatch");
  std::normal_distribution<double> n(0.0, std::sqrt(ch.sigma2 / 2.0));
  auto run_user = [&](const std::vector<std::array<cx, 2>>& h) {
    RxGrid y;
    y.n_symbols = grid.n_symbols;
    y.n_bins = grid.n_bins;
    y.cells.resize(grid.n_symbols * grid.n_bins);
    for (std::size_t sym = 0; sym < grid.n_symbols; ++sym)
      for (std::size_t bin = 0; bin < grid.n_bins; ++bin) {
        const std::array<cx, 2> x{grid.at(0, sym, bin), grid.at(1, sym, bin)};
        y.at(sym, bin) = dot_hx(h[bin], x) + cx{n(rng), n(rng)};
      }
    return y;
  };
  RxGrid y1 = run_user(ch.h1);
  RxGrid y2 = run_user(ch.h2);
  return {std::move(y1), std::move(y2)};
}

std::pair<RxGrid, RxGrid> apply_channel_time(
    const TxGrid& grid, const std::array<std::vector<cx>, 2>& taps_user1,
    const std::array<std::vector<cx>, 2>& taps_user2, double sigma2,
    std::mt19937_64& rng, const FrameGeometry& geom) {
  const auto tx = ofdm_modulate(grid, geom);
  std::normal_distribution<double> n(0.0, std::sqrt(sigma2 / 2.0));
  auto run_user = [&](const std::array<std::vector<cx>, 2>& taps) {
    std::vector<cx> y(geom.frame_samples(), cx{0.0, 0.0});
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t t = 0; t < y.size(); ++t)
        for (std::size_t l = 0; l < taps[a].size() && l <= t; ++l)
          y[t] += taps[a][l] * tx[a][t - l];
    for (auto& v : y) v += cx{n(rng), n(rng)};
    return ofdm_demodulate(y, geom);
  };
  RxGrid y1 = run_user(taps_user1);
  RxGrid y2 = run_user(taps_user2);
  return {std::move(y1), std::move(y2)};
}

double measure_alpha(std::span<const std::array<cx, 2>> h1,
                     std::span<const std::array<cx, 2>> h2) {
  if (h1.empty() || h1.size() != h2.size())
    throw std::invalid_argument("measure_alpha: bad spans");
  double acc = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    const double a = norm2(h1[i]);
    const double b = norm2(h2[i]);
    if (a <= 0.0 || b <= 0.0)
      throw std::invalid_argument("measure_alpha: zero-norm channel");
    acc += 10.0 * std::log10(b / a);
  }
  return acc / static_cast<double>(h1.size());
}

double measure_rho(std::span<const std::array<cx, 2>> h1,
                   std::span<const std::array<cx, 2>> h2) {
  if (h1.empty() || h1.size() != h2.size())
    throw std::invalid_argument("measure_rho: bad spans");
  double acc = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    const double a = std::sqrt(norm2(h1[i]));
    const double b = std::sqrt(norm2(h2[i]));
    if (a <= 0.0 || b <= 0.0)
      throw std::invalid_argument("measure_rho: zero-norm channel");
    double r = 1.0 - std::abs(dot_hx(h1[i], h2[i])) / (a * b);
    acc += std::clamp(r, 0.0, 1.0);
  }
  return acc / static_cast<double>(h1.size());
}

std::vector<std::array<cx, 2>> data_bin_channel(
    std::span<const std::array<cx, 2>> h, const FrameGeometry& geom) {
  std::vector<std::array<cx, 2>> out;
  out.reserve(geom.n_data);
  for (std::size_t bin : geom.data_bins) out.push_back(h[bin]);
  return out;
}

}  // namespace rsma
