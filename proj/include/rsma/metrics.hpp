#pragma once

#include "rsma/channel.hpp"
#include "rsma/mcs.hpp"
#include "rsma/precoder.hpp"

namespace rsma {

// Per-stream, per-data-subcarrier linear SINR.
struct SinrMap {
  std::vector<double> common_u1, common_u2;
  std::vector<double> private_u1, private_u2;
};

// Common at user k: |h^H p_c|^2 / (|h^H p_1|^2 + |h^H p_2|^2 + sigma2).
// Private at user k assumes the common stream removed (RSMA decoding-order
// convention): |h^H p_k|^2 / (|h^H p_j|^2 + sigma2).
SinrMap compute_sinr(const ChannelRealization& ch, const PrecoderSet& pre,
                     const FrameGeometry& geom);

struct BottleneckRates {
  double common = 0.0;  // bits/s/Hz, min over subcarriers of log2(1+SINR)
  double p1 = 0.0;
  double p2 = 0.0;
};

// Wideband spectral-efficiency proxy; the common stream takes the per-
// subcarrier minimum over the two users first.
BottleneckRates bottleneck_proxy(const SinrMap& sinr);

// Expected sum throughput in bps: R(m_c,r_c) Pr(both common) + sum_k
// R(m_k,r_k) Pr(private k), with R(m,r) = B_eff * m * r.
double expected_throughput(const McsGroup& group, double p_common_both,
                           double p_private1, double p_private2,
                           double effective_bandwidth_hz);

struct OutcomeTally {
  std::uint64_t runs = 0;
  std::uint64_t d_sc = 0;  // common decoded by BOTH users
  std::uint64_t d_s1 = 0;
  std::uint64_t d_s2 = 0;
  // Per user: counts over (common ok?, private ok?); index = 2*c_ok + p_ok.
  std::array<std::array<std::uint64_t, 4>, 2> quadrants{};

  void add_run(bool c1_ok, bool p1_ok, bool c2_ok, bool p2_ok);
  void merge(const OutcomeTally& other);
};

// Empirical sum throughput from decode tallies; shares the arithmetic path of
// expected_throughput so the two are bit-identical on matching frequencies.
double empirical_throughput(const OutcomeTally& tally, const McsGroup& group,
                            double effective_bandwidth_hz);

double coded_ber(std::span<const std::uint8_t> decoded,
                 std::span<const std::uint8_t> truth);

struct BerPoint {
  double gamma_db = 0.0;  // demapper-input SNR
  double ber = 0.0;
};

struct BerCurve {
  std::string stream;
  std::vector<BerPoint> points;  // gamma strictly increasing
};

// gamma(beta) by interpolation linear in (gamma dB, log10 BER) at the last
// crossing of the target. Throws std::out_of_range when the curve does not
// bracket beta; no extrapolation.
double gamma_at_ber(const BerCurve& curve, double beta);

// Delta gamma(beta) = gamma_SIC(beta) - gamma_JD(beta) in dB.
double threshold_gain(const BerCurve& curve_sic, const BerCurve& curve_jd,
                      double beta);

}  // namespace rsma
