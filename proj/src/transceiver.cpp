#include "rsma/transceiver.hpp"

#include <algorithm>

namespace rsma {

StreamConfigs make_stream_configs(const McsGroup& group,
                                  const FrameGeometry& geom,
                                  std::size_t list_size) {
  StreamConfigs c;
  c.group = group;
  const Mcs mc = mcs_from_index(group.common);
  const Mcs m1 = mcs_from_index(group.p1);
  const Mcs m2 = mcs_from_index(group.p2);
  c.code_c = build_code_config(mc, geom, list_size);
  c.code_1 = build_code_config(m1, geom, list_size);
  c.code_2 = build_code_config(m2, geom, list_size);
  c.mod_c = build_constellation(mc.mod);
  c.mod_1 = build_constellation(m1.mod);
  c.mod_2 = build_constellation(m2.mod);
  return c;
}

SplitBookkeeping make_bookkeeping(const StreamConfigs& cfgs,
                                  SplitPolicy policy) {
  SplitBookkeeping bk;
  bk.kp1 = cfgs.code_1.info_len;
  bk.kp2 = cfgs.code_2.info_len;
  if (policy == SplitPolicy::symmetric) {
    bk.kc = cfgs.code_c.info_len;
    bk.kc1 = bk.kc / 2;
    bk.kc2 = bk.kc - bk.kc1;
  }
  return bk;
}

SplitMessages split_messages(std::span<const std::uint8_t> w1,
                             std::span<const std::uint8_t> w2,
                             const SplitBookkeeping& bk) {
  if (w1.size() != bk.kc1 + bk.kp1 || w2.size() != bk.kc2 + bk.kp2)
    throw std::invalid_argument("split_messages: message/budget mismatch");
  SplitMessages m;
  m.bk = bk;
  m.wc.reserve(bk.kc);
  m.wc.assign(w1.begin(), w1.begin() + static_cast<std::ptrdiff_t>(bk.kc1));
  m.wc.insert(m.wc.end(), w2.begin(),
              w2.begin() + static_cast<std::ptrdiff_t>(bk.kc2));
  m.wp1.assign(w1.begin() + static_cast<std::ptrdiff_t>(bk.kc1), w1.end());
  m.wp2.assign(w2.begin() + static_cast<std::ptrdiff_t>(bk.kc2), w2.end());
  return m;
}

BitVec combine_message(std::span<const std::uint8_t> wc_hat,
                       std::span<const std::uint8_t> wp_hat, int user,
                       const SplitBookkeeping& bk) {
  if (wc_hat.size() != bk.kc)
    throw std::invalid_argument("combine_message: common length mismatch");
  const std::size_t off = user == 1 ? 0 : bk.kc1;
  const std::size_t len = user == 1 ? bk.kc1 : bk.kc2;
  const std::size_t kp = user == 1 ? bk.kp1 : bk.kp2;
  if (wp_hat.size() != kp)
    throw std::invalid_argument("combine_message: private length mismatch");
  BitVec w;
  w.reserve(len + kp);
  w.assign(wc_hat.begin() + static_cast<std::ptrdiff_t>(off),
           wc_hat.begin() + static_cast<std::ptrdiff_t>(off + len));
  w.insert(w.end(), wp_hat.begin(), wp_hat.end());
  return w;
}

namespace {

std::array<cx, 2> mean_channel(std::span<const std::array<cx, 2>> h) {
  std::array<cx, 2> m{cx{0.0, 0.0}, cx{0.0, 0.0}};
  for (const auto& v : h) {
    m[0] += v[0];
    m[1] += v[1];
  }
  m[0] /= static_cast<double>(h.size());
  m[1] /= static_cast<double>(h.size());
  return m;
}

PrecoderSet design_from_pair(const std::array<cx, 2>& h1,
                             const std::array<cx, 2>& h2, double t) {
  const double n1 = norm2(h1);
  const double n2 = norm2(h2);
  if (n1 <= 0.0 || n2 <= 0.0)
    throw std::invalid_argument("design_precoders: zero channel");

  PrecoderSet p;
  p.common_power_fraction = t;

  // Private precoder for user k: component of h_k orthogonal to the other
  // user's channel; matched filter fallback when the pair is near singular.
  auto zf_dir = [&](const std::array<cx, 2>& own,
                    const std::array<cx, 2>& other,
                    double other_n2) -> std::array<cx, 2> {
    const cx c = dot_hx(other, own) / other_n2;
    std::array<cx, 2> d{own[0] - c * other[0], own[1] - c * other[1]};
    if (norm2(d) <= 1e-12 * norm2(own)) {
      p.zf_fallback = true;
      d = own;
    }
    const double s = std::sqrt(norm2(d));
    return {d[0] / s, d[1] / s};
  };
  const double priv_amp = std::sqrt((1.0 - t) / 2.0);
  if (t < 1.0) {
    const auto d1 = zf_dir(h1, h2, n2);
    const auto d2 = zf_dir(h2, h1, n1);
    p.p_1 = {priv_amp * d1[0], priv_amp * d1[1]};
    p.p_2 = {priv_amp * d2[0], priv_amp * d2[1]};
  }

  if (t > 0.0) {
    // Dominant eigenvector of h1 h1^H + h2 h2^H (the dominant left singular
    // direction of [h1 h2]).
    const double a00 = std::norm(h1[0]) + std::norm(h2[0]);
    const double a11 = std::norm(h1[1]) + std::norm(h2[1]);
    const cx a01 = h1[0] * std::conj(h1[1]) + h2[0] * std::conj(h2[1]);
    const double tr = a00 + a11;
    const double det = a00 * a11 - std::norm(a01);
    const double disc = std::max(0.0, tr * tr / 4.0 - det);
    const double lmax = tr / 2.0 + std::sqrt(disc);
    std::array<cx, 2> v;
    if (std::abs(a01) > 1e-15 * tr)
      v = {a01, cx{lmax - a00, 0.0}};
    else
      v = a00 >= a11 ? std::array<cx, 2>{cx{1, 0}, cx{0, 0}}
                     : std::array<cx, 2>{cx{0, 0}, cx{1, 0}};
    const double s = std::sqrt(t / norm2(v));
    p.p_c = {s * v[0], s * v[1]};
  }
  return p;
}

}  // namespace

PrecoderSet design_precoders(std::span<const std::array<cx, 2>> h1,
                             std::span<const std::array<cx, 2>> h2, double t) {
  if (t < 0.0 || t > 1.0)
    throw std::invalid_argument("design_precoders: t must be in [0,1]");
  if (h1.empty() || h2.empty())
    throw std::invalid_argument("design_precoders: empty channel");
  return design_from_pair(mean_channel(h1), mean_channel(h2), t);
}

std::vector<PrecoderSet> design_precoders_per_subcarrier(
    std::span<const std::array<cx, 2>> h1,
    std::span<const std::array<cx, 2>> h2, double t) {
  if (t < 0.0 || t > 1.0)
    throw std::invalid_argument("design_precoders: t must be in [0,1]");
  if (h1.size() != h2.size() || h1.empty())
    throw std::invalid_argument("design_precoders: span mismatch");
  std::vector<PrecoderSet> out(h1.size());
  for (std::size_t i = 0; i < h1.size(); ++i)
    out[i] = design_from_pair(h1[i], h2[i], t);
  return out;
}

EffectiveGains effective_gains(std::span<const std::array<cx, 2>> h,
                               const PrecoderSet& pre, int user,
                               const FrameGeometry& geom) {
  EffectiveGains g;
  g.g_c.reserve(geom.n_data);
  g.g_p.reserve(geom.n_data);
  const auto& pk = user == 1 ? pre.p_1 : pre.p_2;
  for (std::size_t bin : geom.data_bins) {
    g.g_c.push_back(dot_hx(h[bin], pre.p_c));
    g.g_p.push_back(dot_hx(h[bin], pk));
  }
  return g;
}

EffectiveGains effective_gains(std::span<const std::array<cx, 2>> h,
                               std::span<const PrecoderSet> per_sc, int user,
                               const FrameGeometry& geom) {
  if (per_sc.size() != geom.n_data)
    throw std::invalid_argument("effective_gains: precoder count mismatch");
  EffectiveGains g;
  g.g_c.reserve(geom.n_data);
  g.g_p.reserve(geom.n_data);
  for (std::size_t di = 0; di < geom.n_data; ++di) {
    const std::size_t bin = geom.data_bins[di];
    const auto& pk = user == 1 ? per_sc[di].p_1 : per_sc[di].p_2;
    g.g_c.push_back(dot_hx(h[bin], per_sc[di].p_c));
    g.g_p.push_back(dot_hx(h[bin], pk));
  }
  return g;
}

namespace {

struct EncodedStreams {
  std::vector<cx> s_c, s_1, s_2;
};

EncodedStreams encode_streams(const SplitMessages& msgs,
                              const StreamConfigs& cfgs) {
  EncodedStreams e;
  e.s_c = modulate(polar_encode(msgs.wc, cfgs.code_c), cfgs.mod_c);
  e.s_1 = modulate(polar_encode(msgs.wp1, cfgs.code_1), cfgs.mod_1);
  e.s_2 = modulate(polar_encode(msgs.wp2, cfgs.code_2), cfgs.mod_2);
  return e;
}

}  // namespace

TxGrid transmit(const SplitMessages& msgs, const StreamConfigs& cfgs,
                const PrecoderSet& pre, const FrameGeometry& geom) {
  const auto e = encode_streams(msgs, cfgs);
  return assemble_grid(e.s_c, e.s_1, e.s_2, pre, geom);
}

TxGrid transmit(const SplitMessages& msgs, const StreamConfigs& cfgs,
                std::span<const PrecoderSet> per_sc,
                const FrameGeometry& geom) {
  const auto e = encode_streams(msgs, cfgs);
  return assemble_grid(e.s_c, e.s_1, e.s_2, per_sc, geom);
}

namespace {

void check_rx(const RxGrid& rx, const EffectiveGains& gains,
              const FrameGeometry& geom) {
  if (rx.n_symbols != geom.frame_symbols() || rx.n_bins != geom.n_total)
    throw std::invalid_argument("receive: grid shape mismatch");
  if (gains.g_c.size() != geom.n_data || gains.g_p.size() != geom.n_data)
    throw std::invalid_argument("receive: gain count mismatch");
}

void check_cell(cx y) {
  if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
    throw std::invalid_argument("receive: non-finite input cell");
}

}  // namespace

DecodedResult jd_receive(const RxGrid& rx, const EffectiveGains& gains,
                         double sigma2, const StreamConfigs& cfgs, int user,
                         const FrameGeometry& geom) {
  check_rx(rx, gains, geom);
  const Constellation& xc = cfgs.mod_c;
  const Constellation& xp = user == 1 ? cfgs.mod_1 : cfgs.mod_2;
  const CodeConfig& code_p = user == 1 ? cfgs.code_1 : cfgs.code_2;
  const int bc = xc.m;
  const int bp = xp.m;

  DecodedResult r;
  const std::size_t cells = geom.data_cells();
  r.llr_common.resize(cells * static_cast<std::size_t>(bc));
  r.llr_private.resize(cells * static_cast<std::size_t>(bp));

  double cell_llrs[8];
  for (std::size_t di = 0; di < geom.n_data; ++di) {
    const auto comp = build_composite(gains.g_c[di], gains.g_p[di], xc, xp);
    const std::size_t bin = geom.data_bins[di];
    for (std::size_t sym = 0; sym < geom.payload_symbols; ++sym) {
      const cx y = rx.at(geom.preamble_symbols + sym, bin);
      check_cell(y);
      maxlog_bit_llrs(y, comp.points, bc + bp, sigma2,
                      std::span<double>(cell_llrs, static_cast<std::size_t>(bc + bp)));
      const std::size_t s = sym * geom.n_data + di;
      for (int b = 0; b < bc; ++b)
        r.llr_common[s * static_cast<std::size_t>(bc) + static_cast<std::size_t>(b)] =
            cell_llrs[b];
      for (int b = 0; b < bp; ++b)
        r.llr_private[s * static_cast<std::size_t>(bp) + static_cast<std::size_t>(b)] =
            cell_llrs[bc + b];
    }
  }
  r.wc_hat = polar_decode(r.llr_common, cfgs.code_c);
  r.wp_hat = polar_decode(r.llr_private, code_p);
  return r;
}

DecodedResult sic_receive(
    const RxGrid& rx, const EffectiveGains& gains, double sigma2,
    const StreamConfigs& cfgs, int user, const FrameGeometry& geom,
    std::optional<std::span<const std::uint8_t>> force_common_bits) {
  check_rx(rx, gains, geom);
  const Constellation& xc = cfgs.mod_c;
  const Constellation& xp = user == 1 ? cfgs.mod_1 : cfgs.mod_2;
  const CodeConfig& code_p = user == 1 ? cfgs.code_1 : cfgs.code_2;
  const int bc = xc.m;
  const int bp = xp.m;

  DecodedResult r;
  const std::size_t cells = geom.data_cells();
  r.llr_common.resize(cells * static_cast<std::size_t>(bc));
  r.llr_private.resize(cells * static_cast<std::size_t>(bp));

  // Stage 1: common stream with the private term absorbed into the noise.
  std::vector<cx> scaled(xc.points.size());
  double cell_llrs[8];
  for (std::size_t di = 0; di < geom.n_data; ++di) {
    for (std::size_t i = 0; i < xc.points.size(); ++i)
      scaled[i] = gains.g_c[di] * xc.points[i];
    const double nv = sigma2 + std::norm(gains.g_p[di]);
    const std::size_t bin = geom.data_bins[di];
    for (std::size_t sym = 0; sym < geom.payload_symbols; ++sym) {
      const cx y = rx.at(geom.preamble_symbols + sym, bin);
      check_cell(y);
      maxlog_bit_llrs(y, scaled, bc, nv,
                      std::span<double>(cell_llrs, static_cast<std::size_t>(bc)));
      const std::size_t s = sym * geom.n_data + di;
      for (int b = 0; b < bc; ++b)
        r.llr_common[s * static_cast<std::size_t>(bc) + static_cast<std::size_t>(b)] =
            cell_llrs[b];
    }
  }
  if (force_common_bits) {
    if (force_common_bits->size() != cfgs.code_c.info_len)
      throw std::invalid_argument("sic_receive: forced common length mismatch");
    r.wc_hat.assign(force_common_bits->begin(), force_common_bits->end());
  } else {
    r.wc_hat = polar_decode(r.llr_common, cfgs.code_c);
  }

  // Stage 2: reconstruct, cancel, demap the private stream. Runs regardless
  // of how stage 1 fared, so error propagation shows up naturally.
  const std::vector<cx> s_c_hat =
      modulate(polar_encode(r.wc_hat, cfgs.code_c), xc);
  std::vector<cx> scaled_p(xp.points.size());
  for (std::size_t di = 0; di < geom.n_data; ++di) {
    for (std::size_t i = 0; i < xp.points.size(); ++i)
      scaled_p[i] = gains.g_p[di] * xp.points[i];
    const std::size_t bin = geom.data_bins[di];
    for (std::size_t sym = 0; sym < geom.payload_symbols; ++sym) {
      const std::size_t s = sym * geom.n_data + di;
      const cx y = rx.at(geom.preamble_symbols + sym, bin) -
                   gains.g_c[di] * s_c_hat[s];
      maxlog_bit_llrs(y, scaled_p, bp, sigma2,
                      std::span<double>(cell_llrs, static_cast<std::size_t>(bp)));
      for (int b = 0; b < bp; ++b)
        r.llr_private[s * static_cast<std::size_t>(bp) + static_cast<std::size_t>(b)] =
            cell_llrs[b];
    }
  }
  r.wp_hat = polar_decode(r.llr_private, code_p);
  return r;
}

}  // namespace rsma
