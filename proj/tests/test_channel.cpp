#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rsma/channel.hpp"

using namespace rsma;

namespace {

const FrameGeometry geom = FrameGeometry::standard();

using H = std::vector<std::array<cx, 2>>;

}  // namespace

TEST_CASE("alpha and rho on hand-built vectors") {
  const H h1{{cx{1, 0}, cx{0, 0}}};

  SUBCASE("identical channels") {
    CHECK(measure_alpha(h1, h1) == doctest::Approx(0.0));
    CHECK(measure_rho(h1, h1) == doctest::Approx(0.0));
  }
  SUBCASE("doubled channel gives 6.02 dB, still aligned") {
    const H h2{{cx{2, 0}, cx{0, 0}}};
    CHECK(measure_alpha(h1, h2) == doctest::Approx(10.0 * std::log10(4.0)));
    CHECK(measure_rho(h1, h2) == doctest::Approx(0.0));
  }
  SUBCASE("orthogonal unit vectors") {
    const H h2{{cx{0, 0}, cx{1, 0}}};
    CHECK(measure_alpha(h1, h2) == doctest::Approx(0.0));
    CHECK(measure_rho(h1, h2) == doctest::Approx(1.0));
  }
  SUBCASE("zero-norm channel throws") {
    const H hz{{cx{0, 0}, cx{0, 0}}};
    CHECK_THROWS_AS(measure_alpha(h1, hz), std::invalid_argument);
    CHECK_THROWS_AS(measure_rho(h1, hz), std::invalid_argument);
  }
}

TEST_CASE("rho stays in [0,1] for random vectors") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const H a{{cx{n(rng), n(rng)}, cx{n(rng), n(rng)}}};
    const H b{{cx{n(rng), n(rng)}, cx{n(rng), n(rng)}}};
    const double r = measure_rho(a, b);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("generator hits targets on every realization") {
  std::mt19937_64 rng(2);

  SUBCASE("aligned equal-norm flat construction is exact") {
    const ScenarioTarget t{0.0, 0.0, 1, 0};
    const auto ch = generate_channel_pair(t, geom, 1.0, rng);
    const auto h1 = data_bin_channel(ch.h1, geom);
    const auto h2 = data_bin_channel(ch.h2, geom);
    CHECK(measure_alpha(h1, h2) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(measure_rho(h1, h2) == doctest::Approx(0.0).epsilon(1e-9));
  }

  SUBCASE("rho = 1 gives orthogonal channels") {
    const ScenarioTarget t{0.0, 1.0, 4, 0};
    const auto ch = generate_channel_pair(t, geom, 1.0, rng);
    for (auto bin : geom.data_bins) {
      CHECK(std::abs(dot_hx(ch.h1[bin], ch.h2[bin])) <
            1e-9 * std::sqrt(norm2(ch.h1[bin]) * norm2(ch.h2[bin])));
    }
  }

  SUBCASE("all six lab cases calibrate within tolerance over 75 draws") {
    for (int c = 1; c <= 6; ++c) {
      const ScenarioTarget t = case_target(c);
      double am = 0.0, rm = 0.0;
      const int runs = 75;
      for (int i = 0; i < runs; ++i) {
        std::mt19937_64 r(1000 + static_cast<std::uint64_t>(i));
        const auto ch = generate_channel_pair(t, geom, 1.0, r);
        am += measure_alpha(data_bin_channel(ch.h1, geom),
                            data_bin_channel(ch.h2, geom));
        rm += measure_rho(data_bin_channel(ch.h1, geom),
                          data_bin_channel(ch.h2, geom));
      }
      am /= runs;
      rm /= runs;
      CHECK(std::abs(am - t.alpha_db) <= 0.5);
      CHECK(std::abs(rm - t.rho) <= 0.05);
    }
  }

  SUBCASE("invalid targets throw") {
    std::mt19937_64 r(1);
    CHECK_THROWS_AS(generate_channel_pair({0.0, 1.5, 4, 0}, geom, 1.0, r),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_channel_pair({0.0, 0.5, 0, 0}, geom, 1.0, r),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_channel_pair({0.0, 0.5, 4, 0}, geom, 0.0, r),
                    std::invalid_argument);
  }
}

TEST_CASE("apply_channel behavior") {
  std::mt19937_64 rng(3);
  TxGrid g = make_tx_grid(geom);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t sym = 0; sym < g.n_symbols; ++sym)
    for (auto bin : geom.data_bins) {
      g.at(0, sym, bin) = cx{n(rng), n(rng)};
      g.at(1, sym, bin) = cx{n(rng), n(rng)};
    }

  SUBCASE("vanishing noise leaves the exact inner product") {
    auto ch = generate_channel_pair({0.0, 0.5, 1, 0}, geom, 1.0, rng);
    ch.sigma2 = 1e-300;
    std::mt19937_64 r(4);
    auto [y1, y2] = apply_channel(g, ch, r);
    for (std::size_t sym = 0; sym < g.n_symbols; ++sym)
      for (auto bin : geom.data_bins) {
        const std::array<cx, 2> x{g.at(0, sym, bin), g.at(1, sym, bin)};
        CHECK(std::abs(y1.at(sym, bin) - dot_hx(ch.h1[bin], x)) < 1e-12);
        CHECK(std::abs(y2.at(sym, bin) - dot_hx(ch.h2[bin], x)) < 1e-12);
      }
  }

  SUBCASE("zero grid yields noise with the configured variance") {
    const TxGrid z = make_tx_grid(geom);
    const double sigma2 = 0.25;
    auto ch = generate_channel_pair({0.0, 0.5, 1, 0}, geom, sigma2, rng);
    std::mt19937_64 r(5);
    auto [y1, y2] = apply_channel(z, ch, r);
    double p = 0.0;
    for (const auto& v : y1.cells) p += std::norm(v);
    p /= static_cast<double>(y1.cells.size());
    CHECK(p == doctest::Approx(sigma2).epsilon(0.10));
  }

  SUBCASE("fixed seed reproduces bit-identical output") {
    const auto ch = generate_channel_pair({0.0, 0.5, 4, 0}, geom, 0.5, rng);
    std::mt19937_64 ra(7), rb(7);
    auto [a1, a2] = apply_channel(g, ch, ra);
    auto [b1, b2] = apply_channel(g, ch, rb);
    CHECK(a1.cells == b1.cells);
    CHECK(a2.cells == b2.cells);
  }

  SUBCASE("noise is white across cells") {
    const TxGrid z = make_tx_grid(geom);
    auto ch = generate_channel_pair({0.0, 0.5, 1, 0}, geom, 1.0, rng);
    std::mt19937_64 r(11);
    auto [y1, y2] = apply_channel(z, ch, r);
    // Lag-1 sample correlation over >= 1e4 cells.
    const auto& v = y1.cells;
    REQUIRE(v.size() >= 2000);
    cx acc{0, 0};
    double p = 0.0;
    std::vector<cx> both = v;
    both.insert(both.end(), y2.cells.begin(), y2.cells.end());
    for (std::size_t i = 0; i + 1 < both.size(); ++i) {
      acc += both[i] * std::conj(both[i + 1]);
      p += std::norm(both[i]);
    }
    CHECK(std::abs(acc) / p < 0.05);
  }
}

TEST_CASE("generated realization is deterministic in the rng seed") {
  const ScenarioTarget t = case_target(4);
  std::mt19937_64 ra(42), rb(42);
  const auto a = generate_channel_pair(t, geom, 1.0, ra);
  const auto b = generate_channel_pair(t, geom, 1.0, rb);
  for (std::size_t i = 0; i < a.h1.size(); ++i) {
    CHECK(a.h1[i] == b.h1[i]);
    CHECK(a.h2[i] == b.h2[i]);
  }
}
