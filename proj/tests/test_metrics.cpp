#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rsma/metrics.hpp"
#include "rsma/transceiver.hpp"

using namespace rsma;

namespace {

const FrameGeometry geom = FrameGeometry::standard();
constexpr double beff = 12.0e6;

BerCurve make_curve(std::initializer_list<BerPoint> pts) {
  BerCurve c;
  c.stream = "test";
  c.points = pts;
  return c;
}

}  // namespace

TEST_CASE("per-subcarrier sinr matches a hand recomputation") {
  std::mt19937_64 rng(1);
  const ChannelRealization ch =
      generate_channel_pair({0.0, 0.5, 4, 0}, geom, 0.2, rng);
  const PrecoderSet p = design_precoders(data_bin_channel(ch.h1, geom),
                                         data_bin_channel(ch.h2, geom), 0.6);
  const SinrMap m = compute_sinr(ch, p, geom);
  REQUIRE(m.common_u1.size() == geom.n_data);
  for (std::size_t di = 0; di < geom.n_data; di += 5) {
    const std::size_t bin = geom.data_bins[di];
    const double c1 = std::norm(dot_hx(ch.h1[bin], p.p_c));
    const double g11 = std::norm(dot_hx(ch.h1[bin], p.p_1));
    const double g12 = std::norm(dot_hx(ch.h1[bin], p.p_2));
    CHECK(m.common_u1[di] ==
          doctest::Approx(c1 / (g11 + g12 + ch.sigma2)).epsilon(1e-12));
    CHECK(m.private_u1[di] ==
          doctest::Approx(g11 / (g12 + ch.sigma2)).epsilon(1e-12));
    CHECK(m.private_u1[di] >= 0.0);
  }

  SUBCASE("huge noise drives every sinr toward zero") {
    ChannelRealization loud = ch;
    loud.sigma2 = 1e12;
    const SinrMap z = compute_sinr(loud, p, geom);
    for (double v : z.common_u1) CHECK(v < 1e-9);
    for (double v : z.private_u2) CHECK(v < 1e-9);
  }

  SUBCASE("orthogonal zero-forced channels leave no private interference") {
    ChannelRealization ortho = ch;
    for (std::size_t n = 0; n < geom.n_total; ++n) {
      ortho.h1[n] = {cx{1.0, 0.0}, cx{0.0, 0.0}};
      ortho.h2[n] = {cx{0.0, 0.0}, cx{1.0, 0.0}};
    }
    const PrecoderSet zf = design_precoders(data_bin_channel(ortho.h1, geom),
                                            data_bin_channel(ortho.h2, geom),
                                            0.0);
    const SinrMap z = compute_sinr(ortho, zf, geom);
    for (std::size_t di = 0; di < geom.n_data; ++di)
      CHECK(z.private_u1[di] ==
            doctest::Approx(0.5 / ortho.sigma2).epsilon(1e-9));
  }
}

TEST_CASE("bottleneck proxy takes the per-subcarrier minimum") {
  SinrMap m;
  m.common_u1 = {3.0, 1.0, 7.0};
  m.common_u2 = {3.0, 3.0, 7.0};
  m.private_u1 = {1.0, 1.0, 1.0};
  m.private_u2 = {3.0, 1.0, 7.0};
  const BottleneckRates r = bottleneck_proxy(m);
  CHECK(r.p1 == doctest::Approx(1.0));       // log2(2)
  CHECK(r.p2 == doctest::Approx(1.0));       // min at SINR 1
  CHECK(r.common == doctest::Approx(1.0));   // two-user min hits 1

  // Proxy is a lower bound of every per-subcarrier rate.
  for (double v : m.private_u1) CHECK(r.p1 <= std::log2(1.0 + v) + 1e-12);
}

TEST_CASE("expected throughput arithmetic from the mcs grid") {
  // QPSK 3/4 common + two 16QAM 3/4 privates, all certain: 18 + 36 + 36.
  CHECK(expected_throughput({3, 5, 5}, 1, 1, 1, beff) == 90.0e6);
  CHECK(expected_throughput({3, 5, 5}, 0, 0, 0, beff) == 0.0);
  CHECK(expected_throughput({3, 5, 5}, 0.5, 1, 0, beff) ==
        doctest::Approx(45.0e6).epsilon(1e-12));
  CHECK_THROWS_AS(expected_throughput({3, 5, 5}, 1.5, 0, 0, beff),
                  std::invalid_argument);
}

TEST_CASE("empirical throughput") {
  SUBCASE("all-success tally equals the nominal sum") {
    OutcomeTally t;
    for (int i = 0; i < 75; ++i) t.add_run(true, true, true, true);
    CHECK(empirical_throughput(t, {3, 5, 5}, beff) == 90.0e6);
  }
  SUBCASE("common failures leave only private contributions") {
    OutcomeTally t;
    for (int i = 0; i < 10; ++i) t.add_run(false, true, false, true);
    CHECK(empirical_throughput(t, {3, 4, 4}, beff) == 48.0e6);
  }
  SUBCASE("worked mixed example (60, 75, 30 of 75)") {
    OutcomeTally t;
    for (int i = 0; i < 75; ++i)
      t.add_run(i < 60, true, true, i < 30);  // d_sc = 60, d_s1 = 75, d_s2 = 30
    CHECK(t.d_sc == 60);
    CHECK(empirical_throughput(t, {3, 4, 2}, beff) ==
          doctest::Approx(43.2e6).epsilon(1e-12));
  }
  SUBCASE("empty tally throws") {
    OutcomeTally t;
    CHECK_THROWS_AS(empirical_throughput(t, {3, 4, 2}, beff),
                    std::invalid_argument);
  }
  SUBCASE("consistency with expected_throughput is bit-exact") {
    std::mt19937_64 rng(2);
    OutcomeTally t;
    for (int i = 0; i < 75; ++i)
      t.add_run(rng() & 1, rng() & 1, rng() & 1, rng() & 1);
    const double runs = static_cast<double>(t.runs);
    CHECK(empirical_throughput(t, {4, 1, 5}, beff) ==
          expected_throughput({4, 1, 5}, t.d_sc / runs, t.d_s1 / runs,
                              t.d_s2 / runs, beff));
  }
  SUBCASE("monotone in each success count") {
    OutcomeTally a, b;
    for (int i = 0; i < 20; ++i) {
      a.add_run(i < 5, i < 10, true, i < 15);
      b.add_run(i < 6, i < 10, true, i < 15);
    }
    CHECK(empirical_throughput(b, {3, 2, 2}, beff) >=
          empirical_throughput(a, {3, 2, 2}, beff));
  }
}

TEST_CASE("quadrant tallies") {
  OutcomeTally t;
  SUBCASE("all successes land in (ok, ok)") {
    for (int i = 0; i < 8; ++i) t.add_run(true, true, true, true);
    CHECK(t.quadrants[0][3] == 8);
    CHECK(t.quadrants[1][3] == 8);
    CHECK(t.d_sc == 8);
  }
  SUBCASE("user-1 private-only successes") {
    for (int i = 0; i < 5; ++i) t.add_run(false, true, false, false);
    CHECK(t.quadrants[0][1] == 5);  // (common fail, private ok)
    CHECK(t.quadrants[1][0] == 5);
    CHECK(t.d_sc == 0);
    CHECK(t.d_s1 == 5);
  }
  SUBCASE("constructed mixed batch has exact counts and invariants") {
    t.add_run(true, false, false, true);
    t.add_run(true, true, true, true);
    t.add_run(false, false, true, false);
    t.add_run(true, true, false, false);
    CHECK(t.runs == 4);
    CHECK(t.quadrants[0][2] == 1);
    CHECK(t.quadrants[0][3] == 2);
    CHECK(t.quadrants[0][0] == 1);
    std::uint64_t sum0 = 0, sum1 = 0, c1 = 0, c2 = 0;
    for (int q = 0; q < 4; ++q) {
      sum0 += t.quadrants[0][q];
      sum1 += t.quadrants[1][q];
    }
    c1 = t.quadrants[0][2] + t.quadrants[0][3];
    c2 = t.quadrants[1][2] + t.quadrants[1][3];
    CHECK(sum0 == t.runs);
    CHECK(sum1 == t.runs);
    CHECK(t.d_sc <= std::min(c1, c2));
  }
  SUBCASE("merge is associative accumulation") {
    OutcomeTally a, b;
    a.add_run(true, true, false, true);
    b.add_run(false, false, true, true);
    OutcomeTally ab = a;
    ab.merge(b);
    CHECK(ab.runs == 2);
    CHECK(ab.d_s2 == 2);
  }
}

TEST_CASE("coded ber") {
  const BitVec a{0, 1, 1, 0};
  const BitVec b{0, 1, 0, 1};
  CHECK(coded_ber(a, a) == 0.0);
  CHECK(coded_ber(a, b) == doctest::Approx(0.5));
  CHECK_THROWS_AS(coded_ber(a, BitVec{0}), std::invalid_argument);
}

TEST_CASE("threshold gain") {
  const BerCurve sic = make_curve(
      {{0, 0.4}, {2, 0.1}, {4, 1e-2}, {6, 1e-3}, {8, 1e-4}, {10, 1e-5}});

  SUBCASE("identical curves give zero gain") {
    for (double beta : {3e-2, 1e-3, 3e-5})
      CHECK(threshold_gain(sic, sic, beta) == doctest::Approx(0.0));
  }

  SUBCASE("a 2 dB shift is recovered within 0.01 dB") {
    BerCurve jd = sic;
    for (auto& p : jd.points) p.gamma_db -= 2.0;
    CHECK(threshold_gain(sic, jd, 1e-3) == doctest::Approx(2.0).epsilon(0.005));
    CHECK(threshold_gain(sic, jd, 3e-4) == doctest::Approx(2.0).epsilon(0.005));
  }

  SUBCASE("antisymmetric under curve swap") {
    BerCurve jd = sic;
    for (auto& p : jd.points) p.gamma_db -= 1.3;
    CHECK(threshold_gain(sic, jd, 1e-3) ==
          doctest::Approx(-threshold_gain(jd, sic, 1e-3)));
  }

  SUBCASE("log-linear interpolation lands between grid points") {
    // Between (4, 1e-2) and (6, 1e-3), beta = 10^-2.5 sits at 5.0 dB.
    CHECK(gamma_at_ber(sic, std::pow(10.0, -2.5)) == doctest::Approx(5.0));
  }

  SUBCASE("beta outside the covered range throws") {
    CHECK_THROWS_AS(gamma_at_ber(sic, 0.5), std::out_of_range);
    CHECK_THROWS_AS(gamma_at_ber(sic, 1e-7), std::out_of_range);
    CHECK_THROWS_AS(threshold_gain(sic, sic, 1e-9), std::out_of_range);
  }

  SUBCASE("non-increasing gamma grid is rejected") {
    const BerCurve bad = make_curve({{0, 0.1}, {0, 0.01}});
    CHECK_THROWS_AS(gamma_at_ber(bad, 0.05), std::invalid_argument);
  }
}
