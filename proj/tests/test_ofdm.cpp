#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rsma/channel.hpp"
#include "rsma/ofdm.hpp"

using namespace rsma;

namespace {

const FrameGeometry geom = FrameGeometry::standard();

std::vector<cx> random_symbols(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(2.0));
  std::vector<cx> v(n);
  for (auto& s : v) s = cx{g(rng), g(rng)};
  return v;
}

PrecoderSet test_precoders(double t = 0.5) {
  PrecoderSet p;
  const double pc = std::sqrt(t / 2.0);
  const double pp = std::sqrt((1.0 - t) / 2.0);
  p.p_c = {cx{pc, 0}, cx{pc, 0}};
  p.p_1 = {cx{pp, 0}, cx{0, 0}};
  p.p_2 = {cx{0, 0}, cx{pp, 0}};
  p.common_power_fraction = t;
  return p;
}

double max_grid_err(const TxGrid& a, const RxGrid& b, std::size_t ant) {
  double m = 0.0;
  for (std::size_t s = 0; s < a.n_symbols; ++s)
    for (std::size_t k = 0; k < a.n_bins; ++k)
      m = std::max(m, std::abs(a.at(ant, s, k) - b.at(s, k)));
  return m;
}

}  // namespace

TEST_CASE("geometry partitions the 64 bins") {
  CHECK(geom.n_data + geom.n_pilot + geom.n_guard == geom.n_total);
  CHECK(geom.data_bins.size() == 48);
  CHECK(geom.pilot_bins.size() == 4);
  std::vector<int> used(geom.n_total, 0);
  for (auto b : geom.data_bins) ++used[b];
  for (auto b : geom.pilot_bins) ++used[b];
  for (auto c : used) CHECK(c <= 1);
  CHECK(used[0] == 0);  // DC is guard
  CHECK(geom.data_cells() == 48 * 40);
}

TEST_CASE("assembled grid structure") {
  std::mt19937_64 rng(1);
  const auto sc = random_symbols(geom.data_cells(), rng);
  const auto s1 = random_symbols(geom.data_cells(), rng);
  const auto s2 = random_symbols(geom.data_cells(), rng);
  const PrecoderSet pre = test_precoders();

  SUBCASE("all-zero streams leave pilots and preamble only") {
    const std::vector<cx> z(geom.data_cells(), cx{0, 0});
    const TxGrid g = assemble_grid(z, z, z, pre, geom);
    for (std::size_t sym = geom.preamble_symbols; sym < g.n_symbols; ++sym)
      for (auto bin : geom.data_bins)
        CHECK(std::abs(g.at(0, sym, bin)) + std::abs(g.at(1, sym, bin)) == 0.0);
    // Pilot cells carry exactly one active antenna.
    for (std::size_t sym = 0; sym < geom.payload_symbols; ++sym)
      for (auto bin : geom.pilot_bins) {
        const std::size_t row = geom.preamble_symbols + sym;
        CHECK(std::abs(g.at(sym & 1u, row, bin)) == 1.0);
        CHECK(std::abs(g.at(1u - (sym & 1u), row, bin)) == 0.0);
      }
  }

  SUBCASE("private precoders off reduces to scaled common symbols") {
    PrecoderSet conly = test_precoders(1.0);
    const TxGrid g = assemble_grid(sc, s1, s2, conly, geom);
    for (std::size_t sym = 0; sym < geom.payload_symbols; ++sym)
      for (std::size_t di = 0; di < geom.n_data; ++di) {
        const cx want = conly.p_c[0] * sc[sym * geom.n_data + di];
        CHECK(std::abs(g.at(0, geom.preamble_symbols + sym,
                            geom.data_bins[di]) -
                       want) < 1e-15);
      }
  }

  SUBCASE("random cell equals the recomputed three-term sum") {
    const TxGrid g = assemble_grid(sc, s1, s2, pre, geom);
    std::uniform_int_distribution<std::size_t> psym(0, geom.payload_symbols - 1);
    std::uniform_int_distribution<std::size_t> pdi(0, geom.n_data - 1);
    for (int trial = 0; trial < 32; ++trial) {
      const std::size_t sym = psym(rng);
      const std::size_t di = pdi(rng);
      const std::size_t s = sym * geom.n_data + di;
      for (std::size_t a = 0; a < 2; ++a) {
        const cx want =
            pre.p_c[a] * sc[s] + pre.p_1[a] * s1[s] + pre.p_2[a] * s2[s];
        CHECK(std::abs(g.at(a, geom.preamble_symbols + sym,
                            geom.data_bins[di]) -
                       want) < 1e-15);
      }
    }
  }

  SUBCASE("guard bins carry zero energy") {
    const TxGrid g = assemble_grid(sc, s1, s2, pre, geom);
    std::vector<bool> active(geom.n_total, false);
    for (auto b : geom.data_bins) active[b] = true;
    for (auto b : geom.pilot_bins) active[b] = true;
    for (std::size_t sym = 0; sym < g.n_symbols; ++sym)
      for (std::size_t bin = 0; bin < geom.n_total; ++bin)
        if (!active[bin]) {
          CHECK(std::abs(g.at(0, sym, bin)) == 0.0);
          CHECK(std::abs(g.at(1, sym, bin)) == 0.0);
        }
  }

  SUBCASE("stream length mismatch throws") {
    CHECK_THROWS_AS(assemble_grid(sc, s1, random_symbols(7, rng), pre, geom),
                    std::invalid_argument);
  }
}

TEST_CASE("ofdm modulate/demodulate round trip within 1e-9") {
  std::mt19937_64 rng(2);
  const TxGrid g = assemble_grid(random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 test_precoders(), geom);
  const auto samples = ofdm_modulate(g, geom);
  CHECK(samples[0].size() == geom.frame_samples());
  for (std::size_t a = 0; a < 2; ++a) {
    const RxGrid back = ofdm_demodulate(samples[a], geom);
    CHECK(max_grid_err(g, back, a) < 1e-9);
  }
}

TEST_CASE("zero grid modulates to zero samples") {
  const TxGrid g = make_tx_grid(geom);
  const auto samples = ofdm_modulate(g, geom);
  for (const auto& v : samples[0]) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("single active subcarrier: CP equals the symbol tail") {
  TxGrid g = make_tx_grid(geom);
  g.at(0, 3, geom.data_bins[10]) = cx{1.0, -0.5};
  const auto samples = ofdm_modulate(g, geom);
  const cx* sym = samples[0].data() + 3 * geom.symbol_samples();
  for (std::size_t i = 0; i < geom.cp_len; ++i)
    CHECK(std::abs(sym[i] - sym[geom.n_total + i]) < 1e-12);
}

TEST_CASE("corruption confined to the CP leaves the grid unchanged") {
  std::mt19937_64 rng(3);
  const TxGrid g = assemble_grid(random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 test_precoders(), geom);
  auto samples = ofdm_modulate(g, geom);
  for (std::size_t sym = 0; sym < geom.frame_symbols(); ++sym)
    for (std::size_t i = 0; i < geom.cp_len; ++i)
      samples[0][sym * geom.symbol_samples() + i] += cx{5.0, -2.0};
  const RxGrid back = ofdm_demodulate(samples[0], geom);
  CHECK(max_grid_err(g, back, 0) < 1e-9);
}

TEST_CASE("sample count mismatch throws") {
  CHECK_THROWS_AS(ofdm_demodulate(std::vector<cx>(100), geom),
                  std::invalid_argument);
}

TEST_CASE("flat channel scales the demodulated grid (circular convolution)") {
  std::mt19937_64 rng(4);
  const TxGrid g = assemble_grid(random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 test_precoders(), geom);
  const cx h{0.8, -0.6};
  auto samples = ofdm_modulate(g, geom);
  for (auto& v : samples[0]) v *= h;
  const RxGrid back = ofdm_demodulate(samples[0], geom);
  double err = 0.0;
  for (std::size_t s = 0; s < g.n_symbols; ++s)
    for (std::size_t k = 0; k < g.n_bins; ++k)
      err = std::max(err, std::abs(h * g.at(0, s, k) - back.at(s, k)));
  CHECK(err < 1e-9);
}

TEST_CASE("time-domain and frequency-domain channel paths agree") {
  std::mt19937_64 rng(5);
  const TxGrid g = assemble_grid(random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 test_precoders(), geom);
  std::normal_distribution<double> n(0.0, 1.0);
  auto taps = [&](std::size_t count) {
    std::array<std::vector<cx>, 2> t;
    for (auto& v : t) {
      v.resize(count);
      for (auto& c : v) c = cx{n(rng), n(rng)} * 0.5;
    }
    return t;
  };

  SUBCASE("flat channel") {
    const auto t1 = taps(1), t2 = taps(1);
    const auto ch = realization_from_taps(t1, t2, 1e-12, geom);
    std::mt19937_64 ra(9), rb(9);
    ChannelRealization noiseless = ch;
    noiseless.sigma2 = 1e-300;
    auto [f1, f2] = apply_channel(g, noiseless, ra);
    auto [d1, d2] = apply_channel_time(g, t1, t2, 0.0, rb, geom);
    double err = 0.0;
    for (std::size_t i = 0; i < f1.cells.size(); ++i) {
      err = std::max(err, std::abs(f1.cells[i] - d1.cells[i]));
      err = std::max(err, std::abs(f2.cells[i] - d2.cells[i]));
    }
    CHECK(err < 1e-9);
  }

  SUBCASE("multi-tap channel inside the CP") {
    const auto t1 = taps(4), t2 = taps(7);
    const auto ch = realization_from_taps(t1, t2, 1.0, geom);
    ChannelRealization noiseless = ch;
    noiseless.sigma2 = 1e-300;
    std::mt19937_64 ra(9), rb(9);
    auto [f1, f2] = apply_channel(g, noiseless, ra);
    auto [d1, d2] = apply_channel_time(g, t1, t2, 0.0, rb, geom);
    double err = 0.0;
    for (std::size_t i = 0; i < f1.cells.size(); ++i) {
      err = std::max(err, std::abs(f1.cells[i] - d1.cells[i]));
      err = std::max(err, std::abs(f2.cells[i] - d2.cells[i]));
    }
    CHECK(err < 1e-9);
  }
}

TEST_CASE("channel estimation") {
  std::mt19937_64 rng(6);
  const TxGrid g = assemble_grid(random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 test_precoders(), geom);

  SUBCASE("noiseless flat channel is recovered exactly on active bins") {
    std::normal_distribution<double> n(0.0, 1.0);
    std::array<std::vector<cx>, 2> taps;
    for (auto& v : taps) v = {cx{n(rng), n(rng)}};
    auto ch = realization_from_taps(taps, taps, 1.0, geom);
    ch.sigma2 = 1e-300;
    auto [y1, y2] = apply_channel(g, ch, rng);
    const ChannelEstimate est = estimate_channel(y1, geom);
    for (auto bin : geom.data_bins)
      for (std::size_t a = 0; a < 2; ++a)
        CHECK(std::abs(est.h_hat[bin][a] - ch.h1[bin][a]) < 1e-9);
  }

  SUBCASE("noise variance estimate lands within 20% over 75 frames") {
    const double sigma2 = 0.1;
    double acc = 0.0;
    const int frames = 75;
    for (int fidx = 0; fidx < frames; ++fidx) {
      std::mt19937_64 r2(100 + static_cast<std::uint64_t>(fidx));
      const auto ch = generate_channel_pair({0.0, 0.5, 4, 0}, geom, sigma2, r2);
      auto [y1, y2] = apply_channel(g, ch, r2);
      acc += estimate_channel(y1, geom).sigma2_hat;
    }
    acc /= frames;
    CHECK(acc == doctest::Approx(sigma2).epsilon(0.2));
  }

  SUBCASE("degenerate zero input throws") {
    RxGrid z = make_rx_grid(geom);
    CHECK_THROWS_AS(estimate_channel(z, geom), std::invalid_argument);
  }
}

TEST_CASE("full loopback through an identity channel") {
  std::mt19937_64 rng(8);
  const TxGrid g = assemble_grid(random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 random_symbols(geom.data_cells(), rng),
                                 test_precoders(), geom);
  // Identity: single unit tap on antenna 0, silent antenna 1 for user 1.
  std::array<std::vector<cx>, 2> t1{{{cx{1, 0}}, {cx{0, 0}}}};
  std::mt19937_64 r(1);
  auto [y1, y2] = apply_channel_time(g, t1, t1, 0.0, r, geom);
  CHECK(max_grid_err(g, y1, 0) < 1e-9);
}
