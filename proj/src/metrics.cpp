#include "rsma/metrics.hpp"

#include <algorithm>

namespace rsma {

SinrMap compute_sinr(const ChannelRealization& ch, const PrecoderSet& pre,
                     const FrameGeometry& geom) {
  if (!(ch.sigma2 > 0.0))
    throw std::invalid_argument("compute_sinr: sigma2 must be > 0");
  SinrMap m;
  m.common_u1.reserve(geom.n_data);
  m.common_u2.reserve(geom.n_data);
  m.private_u1.reserve(geom.n_data);
  m.private_u2.reserve(geom.n_data);
  for (std::size_t bin : geom.data_bins) {
    const double c1 = std::norm(dot_hx(ch.h1[bin], pre.p_c));
    const double c2 = std::norm(dot_hx(ch.h2[bin], pre.p_c));
    const double g11 = std::norm(dot_hx(ch.h1[bin], pre.p_1));
    const double g12 = std::norm(dot_hx(ch.h1[bin], pre.p_2));
    const double g21 = std::norm(dot_hx(ch.h2[bin], pre.p_1));
    const double g22 = std::norm(dot_hx(ch.h2[bin], pre.p_2));
    m.common_u1.push_back(c1 / (g11 + g12 + ch.sigma2));
    m.common_u2.push_back(c2 / (g21 + g22 + ch.sigma2));
    m.private_u1.push_back(g11 / (g12 + ch.sigma2));
    m.private_u2.push_back(g22 / (g21 + ch.sigma2));
  }
  return m;
}

BottleneckRates bottleneck_proxy(const SinrMap& sinr) {
  if (sinr.common_u1.empty())
    throw std::invalid_argument("bottleneck_proxy: empty SINR map");
  BottleneckRates r;
  auto min_rate = [](const std::vector<double>& s) {
    double m = std::numeric_limits<double>::infinity();
    for (double v : s) m = std::min(m, std::log2(1.0 + v));
    return m;
  };
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < sinr.common_u1.size(); ++n)
    c = std::min(c, std::log2(1.0 + std::min(sinr.common_u1[n], sinr.common_u2[n])));
  r.common = c;
  r.p1 = min_rate(sinr.private_u1);
  r.p2 = min_rate(sinr.private_u2);
  return r;
}

double expected_throughput(const McsGroup& group, double p_common_both,
                           double p_private1, double p_private2,
                           double effective_bandwidth_hz) {
  for (double p : {p_common_both, p_private1, p_private2})
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("expected_throughput: probability out of [0,1]");
  return nominal_rate_bps(mcs_from_index(group.common), effective_bandwidth_hz) *
             p_common_both +
         nominal_rate_bps(mcs_from_index(group.p1), effective_bandwidth_hz) *
             p_private1 +
         nominal_rate_bps(mcs_from_index(group.p2), effective_bandwidth_hz) *
             p_private2;
}

void OutcomeTally::add_run(bool c1_ok, bool p1_ok, bool c2_ok, bool p2_ok) {
  ++runs;
  d_sc += (c1_ok && c2_ok) ? 1u : 0u;
  d_s1 += p1_ok ? 1u : 0u;
  d_s2 += p2_ok ? 1u : 0u;
  ++quadrants[0][2u * (c1_ok ? 1u : 0u) + (p1_ok ? 1u : 0u)];
  ++quadrants[1][2u * (c2_ok ? 1u : 0u) + (p2_ok ? 1u : 0u)];
}

void OutcomeTally::merge(const OutcomeTally& o) {
  runs += o.runs;
  d_sc += o.d_sc;
  d_s1 += o.d_s1;
  d_s2 += o.d_s2;
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t q = 0; q < 4; ++q) quadrants[u][q] += o.quadrants[u][q];
}

double empirical_throughput(const OutcomeTally& tally, const McsGroup& group,
                            double effective_bandwidth_hz) {
  if (tally.runs == 0)
    throw std::invalid_argument("empirical_throughput: no runs tallied");
  const double t = static_cast<double>(tally.runs);
  return expected_throughput(group, static_cast<double>(tally.d_sc) / t,
                             static_cast<double>(tally.d_s1) / t,
                             static_cast<double>(tally.d_s2) / t,
                             effective_bandwidth_hz);
}

double coded_ber(std::span<const std::uint8_t> decoded,
                 std::span<const std::uint8_t> truth) {
  if (decoded.size() != truth.size() || decoded.empty())
    throw std::invalid_argument("coded_ber: length mismatch");
  return static_cast<double>(count_bit_errors(decoded, truth)) /
         static_cast<double>(decoded.size());
}

double gamma_at_ber(const BerCurve& curve, double beta) {
  const auto& pts = curve.points;
  if (pts.size() < 2)
    throw std::out_of_range("gamma_at_ber: need at least two points");
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i].gamma_db > pts[i - 1].gamma_db))
      throw std::invalid_argument("gamma_at_ber: gamma not increasing");
  if (!(beta > 0.0))
    throw std::invalid_argument("gamma_at_ber: beta must be positive");

  std::size_t j = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].ber >= beta) j = i;
  if (j == pts.size() || j + 1 == pts.size())
    throw std::out_of_range("gamma_at_ber: curve does not bracket beta");

  const BerPoint& a = pts[j];
  const BerPoint& b = pts[j + 1];
  if (a.ber == beta) return a.gamma_db;
  if (b.ber == beta) return b.gamma_db;
  // Zero BERs get floored so the log interpolation stays defined.
  constexpr double kFloor = 1e-12;
  const double la = std::log10(std::max(a.ber, kFloor));
  const double lb = std::log10(std::max(b.ber, kFloor));
  const double lt = std::log10(beta);
  return a.gamma_db + (b.gamma_db - a.gamma_db) * (la - lt) / (la - lb);
}

double threshold_gain(const BerCurve& curve_sic, const BerCurve& curve_jd,
                      double beta) {
  return gamma_at_ber(curve_sic, beta) - gamma_at_ber(curve_jd, beta);
}

}  // namespace rsma
