#pragma once

#include <optional>

#include "rsma/channel.hpp"
#include "rsma/constellation.hpp"
#include "rsma/mcs.hpp"
#include "rsma/ofdm.hpp"
#include "rsma/polar.hpp"
#include "rsma/precoder.hpp"

namespace rsma {

// Everything derived from an MCS group for one frame: code configs and
// alphabets for the common stream and both private streams.
struct StreamConfigs {
  McsGroup group;
  CodeConfig code_c, code_1, code_2;
  Constellation mod_c, mod_1, mod_2;
};

StreamConfigs make_stream_configs(const McsGroup& group,
                                  const FrameGeometry& geom,
                                  std::size_t list_size = 8);

enum class SplitPolicy {
  symmetric,    // common payload divided equally between the users
  all_private,  // degenerate: empty common message, W_k goes private
};

struct SplitBookkeeping {
  std::size_t kc = 0;   // combined common info bits
  std::size_t kc1 = 0;  // user-1 share (leading slice of W_c)
  std::size_t kc2 = 0;
  std::size_t kp1 = 0;
  std::size_t kp2 = 0;

  std::size_t user_message_len(int user) const {
    return user == 1 ? kc1 + kp1 : kc2 + kp2;
  }
};

struct SplitMessages {
  BitVec wc;
  BitVec wp1;
  BitVec wp2;
  SplitBookkeeping bk;
};

SplitBookkeeping make_bookkeeping(const StreamConfigs& cfgs,
                                  SplitPolicy policy = SplitPolicy::symmetric);

// W_k = [common share | private part]; W_c = share_1 || share_2.
SplitMessages split_messages(std::span<const std::uint8_t> w1,
                             std::span<const std::uint8_t> w2,
                             const SplitBookkeeping& bk);

BitVec combine_message(std::span<const std::uint8_t> wc_hat,
                       std::span<const std::uint8_t> wp_hat, int user,
                       const SplitBookkeeping& bk);

// Zero-forcing private precoders on the given per-subcarrier channels
// (averaged over subcarriers for the wideband variant), equal private power
// split (1-t)/2; common precoder along the dominant singular direction of the
// stacked channels with power t.
PrecoderSet design_precoders(std::span<const std::array<cx, 2>> h1,
                             std::span<const std::array<cx, 2>> h2, double t);

// One PrecoderSet per entry of the channel spans.
std::vector<PrecoderSet> design_precoders_per_subcarrier(
    std::span<const std::array<cx, 2>> h1,
    std::span<const std::array<cx, 2>> h2, double t);

// Effective complex gains seen by user's common and private streams on each
// data subcarrier: g_c[n] = h[n]^H p_c, g_p[n] = h[n]^H p_k.
struct EffectiveGains {
  std::vector<cx> g_c;
  std::vector<cx> g_p;
};

EffectiveGains effective_gains(std::span<const std::array<cx, 2>> h_all_bins,
                               const PrecoderSet& pre, int user,
                               const FrameGeometry& geom);
EffectiveGains effective_gains(std::span<const std::array<cx, 2>> h_all_bins,
                               std::span<const PrecoderSet> per_sc, int user,
                               const FrameGeometry& geom);

// Encode, modulate and assemble the full transmit grid.
TxGrid transmit(const SplitMessages& msgs, const StreamConfigs& cfgs,
                const PrecoderSet& pre, const FrameGeometry& geom);
TxGrid transmit(const SplitMessages& msgs, const StreamConfigs& cfgs,
                std::span<const PrecoderSet> per_sc, const FrameGeometry& geom);

struct DecodedResult {
  BitVec wc_hat;
  BitVec wp_hat;
  std::vector<double> llr_common;
  std::vector<double> llr_private;
};

// SIC-free receiver: per data subcarrier, max-log bit LLRs over the composite
// constellation; the leading b_c LLRs feed the common decoder, the trailing
// b_p the private decoder. No cancellation stage.
DecodedResult jd_receive(const RxGrid& rx, const EffectiveGains& gains,
                         double sigma2, const StreamConfigs& cfgs, int user,
                         const FrameGeometry& geom);

// Baseline receiver: demap the common stream treating the private term as
// Gaussian noise of power |g_p|^2, decode, re-encode and re-modulate, subtract
// g_c * s_c, then demap and decode the private stream. Stage 2 always runs.
// force_common_bits replaces the stage-1 decision (test hook for studying
// error propagation).
DecodedResult sic_receive(
    const RxGrid& rx, const EffectiveGains& gains, double sigma2,
    const StreamConfigs& cfgs, int user, const FrameGeometry& geom,
    std::optional<std::span<const std::uint8_t>> force_common_bits = {});

}  // namespace rsma
