#include "rsma/polar.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>
#include <numeric>

namespace rsma {

namespace {

constexpr double kDesignEsN0Db = 3.0;
constexpr double kBigMean = 1e18;    // GA mean for shortened (known) outputs
constexpr double kShortLlr = 1e30;   // decoder-side LLR for shortened outputs

// Gaussian-approximation helper functions (Chung et al. fit).
double ga_phi(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 10.0) return std::exp(-0.4527 * std::pow(x, 0.86) + 0.0218);
  const double v =
      std::sqrt(pi / x) * std::exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x));
  return v > 0.0 ? v : 0.0;
}

double ga_phi_inv(double y) {
  if (y >= 1.0) return 0.0;
  if (y <= 0.0) return kBigMean;
  const double y10 = ga_phi(10.0);
  if (y > y10)
    return std::pow((0.0218 - std::log(y)) / 0.4527, 1.0 / 0.86);
  double lo = 10.0;
  double hi = std::max(12.0, -4.0 * std::log(y) + 40.0);
  for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ga_phi(mid) > y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double ga_check(double a, double b) {
  const double pa = ga_phi(a);
  const double pb = ga_phi(b);
  const double p = pa + pb - pa * pb;
  return ga_phi_inv(p);
}

// Evolves channel LLR means (indexed by mother-code output position) into
// input-bit reliability means, mirroring the halves pairing of the decoder.
void ga_evolve(std::span<double> z, std::span<double> scratch) {
  const std::size_t n = z.size();
  if (n == 1) return;
  const std::size_t half = n / 2;
  for (std::size_t b = 0; b < half; ++b) {
    scratch[b] = ga_check(z[b], z[b + half]);
    scratch[b + half] = z[b] + z[b + half];
  }
  std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(n),
            z.begin());
  ga_evolve(z.subspan(0, half), scratch.subspan(0, half));
  ga_evolve(z.subspan(half), scratch.subspan(half));
}

double f_op(double a, double b) {
  const double m = std::min(std::fabs(a), std::fabs(b));
  return ((a < 0.0) != (b < 0.0)) ? -m : m;
}

// Successive-cancellation list decoder over the natural-order transform.
// Per-path LLR and partial-sum arrays are shared between paths and copied
// lazily on write, so a decode costs O(L N log N).
class SclDecoder {
 public:
  SclDecoder(const CodeConfig& cfg)
      : cfg_(cfg),
        n_(cfg.mother_len),
        levels_(static_cast<int>(std::countr_zero(cfg.mother_len))),
        list_(std::max<std::size_t>(1, cfg.list_size)) {
    llr_pool_.resize(static_cast<std::size_t>(levels_) + 1);
    llr_ref_.resize(static_cast<std::size_t>(levels_) + 1);
    llr_free_.resize(static_cast<std::size_t>(levels_) + 1);
    bit_pool_.resize(static_cast<std::size_t>(levels_));
    bit_ref_.resize(static_cast<std::size_t>(levels_));
    bit_free_.resize(static_cast<std::size_t>(levels_));
    for (int lv = 0; lv <= levels_; ++lv) {
      const std::size_t sz = n_ >> lv;
      const std::size_t cnt = list_ + 1;
      llr_pool_[lv].assign(cnt, std::vector<double>(sz));
      llr_ref_[lv].assign(cnt, 0);
      for (std::size_t i = 0; i < cnt; ++i) llr_free_[lv].push_back(i);
      if (lv < levels_) {
        bit_pool_[lv].assign(cnt, std::vector<std::uint8_t>(sz));
        bit_ref_[lv].assign(cnt, 0);
        for (std::size_t i = 0; i < cnt; ++i) bit_free_[lv].push_back(i);
      }
    }
    llr_idx_.assign(static_cast<std::size_t>(levels_) + 1,
                    std::vector<std::size_t>(list_, 0));
    bit_idx_.assign(static_cast<std::size_t>(levels_),
                    std::vector<std::size_t>(list_, 0));
    active_.assign(list_, false);
    metric_.assign(list_, 0.0);
  }

  BitVec decode(std::span<const double> mother_llrs) {
    // Initial path owns one array per level.
    for (int lv = 0; lv <= levels_; ++lv) {
      llr_idx_[lv][0] = alloc_llr(lv);
      if (lv < levels_) bit_idx_[lv][0] = alloc_bit(lv);
    }
    std::copy(mother_llrs.begin(), mother_llrs.end(),
              llr_pool_[0][llr_idx_[0][0]].begin());
    active_[0] = true;
    metric_[0] = 0.0;
    u_next_ = 0;

    decode_node(0, false);

    std::size_t best = list_;
    for (std::size_t p = 0; p < list_; ++p) {
      if (!active_[p]) continue;
      if (best == list_ || metric_[p] < metric_[best]) best = p;
    }
    BitVec u(n_);
    const auto& cw = bit_pool_[0][bit_idx_[0][best]];
    std::copy(cw.begin(), cw.end(), u.begin());
    polar_transform_inplace(u);
    return u;
  }

 private:
  const CodeConfig& cfg_;
  std::size_t n_;
  int levels_;
  std::size_t list_;
  std::size_t u_next_ = 0;

  std::vector<std::vector<std::vector<double>>> llr_pool_;
  std::vector<std::vector<int>> llr_ref_;
  std::vector<std::vector<std::size_t>> llr_free_;
  std::vector<std::vector<std::vector<std::uint8_t>>> bit_pool_;
  std::vector<std::vector<int>> bit_ref_;
  std::vector<std::vector<std::size_t>> bit_free_;
  std::vector<std::vector<std::size_t>> llr_idx_;  // [level][path]
  std::vector<std::vector<std::size_t>> bit_idx_;  // [level][path]
  std::vector<bool> active_;
  std::vector<double> metric_;

  std::size_t alloc_llr(int lv) {
    const std::size_t i = llr_free_[lv].back();
    llr_free_[lv].pop_back();
    llr_ref_[lv][i] = 1;
    return i;
  }
  std::size_t alloc_bit(int lv) {
    const std::size_t i = bit_free_[lv].back();
    bit_free_[lv].pop_back();
    bit_ref_[lv][i] = 1;
    return i;
  }

  const double* llr_read(int lv, std::size_t p) const {
    return llr_pool_[lv][llr_idx_[lv][p]].data();
  }
  const std::uint8_t* bit_read(int lv, std::size_t p) const {
    return bit_pool_[lv][bit_idx_[lv][p]].data();
  }

  double* llr_write(int lv, std::size_t p) {
    // Callers fully overwrite the array, so no copy on detach.
    const std::size_t cur = llr_idx_[lv][p];
    if (llr_ref_[lv][cur] == 1) return llr_pool_[lv][cur].data();
    --llr_ref_[lv][cur];
    const std::size_t fresh = alloc_llr(lv);
    llr_idx_[lv][p] = fresh;
    return llr_pool_[lv][fresh].data();
  }

  std::uint8_t* bit_write(int lv, std::size_t p, bool preserve) {
    const std::size_t cur = bit_idx_[lv][p];
    if (bit_ref_[lv][cur] == 1) return bit_pool_[lv][cur].data();
    --bit_ref_[lv][cur];
    const std::size_t fresh = alloc_bit(lv);
    if (preserve) bit_pool_[lv][fresh] = bit_pool_[lv][cur];
    bit_idx_[lv][p] = fresh;
    return bit_pool_[lv][fresh].data();
  }

  std::size_t clone_path(std::size_t src) {
    std::size_t dst = list_;
    for (std::size_t p = 0; p < list_; ++p)
      if (!active_[p]) {
        dst = p;
        break;
      }
    active_[dst] = true;
    metric_[dst] = metric_[src];
    for (int lv = 0; lv <= levels_; ++lv) {
      llr_idx_[lv][dst] = llr_idx_[lv][src];
      ++llr_ref_[lv][llr_idx_[lv][src]];
      if (lv < levels_) {
        bit_idx_[lv][dst] = bit_idx_[lv][src];
        ++bit_ref_[lv][bit_idx_[lv][src]];
      }
    }
    return dst;
  }

  void kill_path(std::size_t p) {
    active_[p] = false;
    for (int lv = 0; lv <= levels_; ++lv) {
      const std::size_t i = llr_idx_[lv][p];
      if (--llr_ref_[lv][i] == 0) llr_free_[lv].push_back(i);
      if (lv < levels_) {
        const std::size_t j = bit_idx_[lv][p];
        if (--bit_ref_[lv][j] == 0) bit_free_[lv].push_back(j);
      }
    }
  }

  // Writes a completed subtree's re-encoded bits into the parent staging
  // buffer: the left child fills the lower half, the right child xors into it
  // and fills the upper half.
  void push_up(std::size_t p, int lv, bool is_left) {
    const std::size_t size = n_ >> lv;
    const std::uint8_t* src = bit_read(lv, p);
    std::uint8_t* dst = bit_write(lv - 1, p, /*preserve=*/!is_left);
    if (is_left) {
      std::memcpy(dst, src, size);
    } else {
      for (std::size_t b = 0; b < size; ++b) {
        dst[b] = static_cast<std::uint8_t>(dst[b] ^ src[b]);
        dst[b + size] = src[b];
      }
    }
  }

  void set_leaf_decision(std::size_t p, std::uint8_t d, bool is_left) {
    std::uint8_t* dst = bit_write(levels_ - 1, p, /*preserve=*/!is_left);
    if (is_left)
      dst[0] = d;
    else {
      dst[0] = static_cast<std::uint8_t>(dst[0] ^ d);
      dst[1] = d;
    }
  }

  void leaf(bool is_left) {
    const std::size_t u = u_next_++;
    if (cfg_.forced_zero[u]) {
      for (std::size_t p = 0; p < list_; ++p) {
        if (!active_[p]) continue;
        const double l = llr_read(levels_, p)[0];
        if (l < 0.0) metric_[p] -= l;
        set_leaf_decision(p, 0, is_left);
      }
      return;
    }

    struct Cand {
      double metric;
      std::size_t path;
      std::uint8_t d;
    };
    Cand cands[2 * 64];
    std::size_t nc = 0;
    for (std::size_t p = 0; p < list_; ++p) {
      if (!active_[p]) continue;
      const double l = llr_read(levels_, p)[0];
      cands[nc++] = {metric_[p] + (l < 0.0 ? -l : 0.0), p, 0};
      cands[nc++] = {metric_[p] + (l > 0.0 ? l : 0.0), p, 1};
    }
    const std::size_t keep = std::min(list_, nc);
    std::sort(cands, cands + nc, [](const Cand& a, const Cand& b) {
      if (a.metric != b.metric) return a.metric < b.metric;
      if (a.path != b.path) return a.path < b.path;
      return a.d < b.d;
    });

    bool keep0[64] = {}, keep1[64] = {};
    double m0[64], m1[64];
    for (std::size_t i = 0; i < keep; ++i) {
      const Cand& c = cands[i];
      if (c.d == 0) {
        keep0[c.path] = true;
        m0[c.path] = c.metric;
      } else {
        keep1[c.path] = true;
        m1[c.path] = c.metric;
      }
    }
    // Free dropped paths first so clones have slots.
    for (std::size_t p = 0; p < list_; ++p)
      if (active_[p] && !keep0[p] && !keep1[p]) kill_path(p);
    for (std::size_t p = 0; p < list_; ++p) {
      if (!active_[p]) continue;
      if (keep0[p] && keep1[p]) {
        const std::size_t q = clone_path(p);
        metric_[p] = m0[p];
        metric_[q] = m1[p];
        set_leaf_decision(p, 0, is_left);
        set_leaf_decision(q, 1, is_left);
      } else if (keep0[p]) {
        metric_[p] = m0[p];
        set_leaf_decision(p, 0, is_left);
      } else if (keep1[p]) {
        metric_[p] = m1[p];
        set_leaf_decision(p, 1, is_left);
      }
    }
  }

  void decode_node(int lv, bool is_left) {
    const std::size_t size = n_ >> lv;
    if (size == 1) {
      leaf(is_left);
      return;
    }
    const std::size_t half = size / 2;
    for (std::size_t p = 0; p < list_; ++p) {
      if (!active_[p]) continue;
      const double* pa = llr_read(lv, p);
      double* pc = llr_write(lv + 1, p);
      for (std::size_t b = 0; b < half; ++b) pc[b] = f_op(pa[b], pa[b + half]);
    }
    decode_node(lv + 1, true);
    for (std::size_t p = 0; p < list_; ++p) {
      if (!active_[p]) continue;
      const double* pa = llr_read(lv, p);
      const std::uint8_t* bs = bit_read(lv, p);
      double* pc = llr_write(lv + 1, p);
      for (std::size_t b = 0; b < half; ++b)
        pc[b] = bs[b] ? pa[b + half] - pa[b] : pa[b + half] + pa[b];
    }
    decode_node(lv + 1, false);
    if (lv > 0) {
      for (std::size_t p = 0; p < list_; ++p)
        if (active_[p]) push_up(p, lv, is_left);
    }
  }
};

}  // namespace

void polar_transform_inplace(std::span<std::uint8_t> bits) {
  const std::size_t n = bits.size();
  for (std::size_t len = 1; len < n; len <<= 1)
    for (std::size_t i = 0; i < n; i += len << 1)
      for (std::size_t j = i; j < i + len; ++j)
        bits[j] = static_cast<std::uint8_t>(bits[j] ^ bits[j + len]);
}

std::vector<std::uint32_t> inverse_permutation(
    std::span<const std::uint32_t> perm) {
  std::vector<std::uint32_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    inv[perm[i]] = static_cast<std::uint32_t>(i);
  return inv;
}

CodeConfig build_code_config(const Mcs& mcs, const FrameGeometry& geom,
                             std::size_t list_size) {
  const bool rate_ok = (mcs.rate_num == 1 && mcs.rate_den == 2) ||
                       (mcs.rate_num == 3 && mcs.rate_den == 4);
  if (!rate_ok)
    throw std::invalid_argument("build_code_config: unsupported code rate");
  if (list_size == 0 || list_size > 64)
    throw std::invalid_argument("build_code_config: list size must be 1..64");

  CodeConfig cfg;
  const std::size_t m = static_cast<std::size_t>(bits_per_symbol(mcs.mod));
  cfg.coded_len = geom.data_cells() * m;
  if (cfg.coded_len * static_cast<std::size_t>(mcs.rate_num) %
          static_cast<std::size_t>(mcs.rate_den) !=
      0)
    throw std::invalid_argument("build_code_config: inexact info length");
  cfg.info_len = cfg.coded_len * static_cast<std::size_t>(mcs.rate_num) /
                 static_cast<std::size_t>(mcs.rate_den);
  cfg.mother_len = std::bit_ceil(cfg.coded_len);
  cfg.list_size = list_size;

  for (std::size_t i = cfg.coded_len; i < cfg.mother_len; ++i)
    cfg.shortening_set.push_back(static_cast<std::uint32_t>(i));

  // Reliability means: transmitted outputs at the design SNR, shortened
  // outputs known (effectively infinite).
  std::vector<double> means(cfg.mother_len);
  const double design_mean = 4.0 * db_to_linear(kDesignEsN0Db);
  for (std::size_t i = 0; i < cfg.mother_len; ++i)
    means[i] = i < cfg.coded_len ? design_mean : kBigMean;
  std::vector<double> scratch(cfg.mother_len);
  ga_evolve(means, scratch);

  std::vector<std::uint32_t> order(cfg.coded_len);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     if (means[a] != means[b]) return means[a] > means[b];
                     return a > b;
                   });
  cfg.info_positions.assign(order.begin(),
                            order.begin() + static_cast<std::ptrdiff_t>(cfg.info_len));
  std::sort(cfg.info_positions.begin(), cfg.info_positions.end());
  cfg.frozen_set.assign(order.begin() + static_cast<std::ptrdiff_t>(cfg.info_len),
                        order.end());
  std::sort(cfg.frozen_set.begin(), cfg.frozen_set.end());

  cfg.forced_zero.assign(cfg.mother_len, 1);
  for (std::uint32_t i : cfg.info_positions) cfg.forced_zero[i] = 0;

  cfg.interleaver.resize(cfg.coded_len);
  std::iota(cfg.interleaver.begin(), cfg.interleaver.end(), 0u);
  std::mt19937_64 perm_rng(splitmix64(0x1EAFull ^ (cfg.coded_len << 20) ^
                                      cfg.info_len));
  std::shuffle(cfg.interleaver.begin(), cfg.interleaver.end(), perm_rng);
  return cfg;
}

BitVec polar_encode(std::span<const std::uint8_t> info, const CodeConfig& cfg) {
  if (info.size() != cfg.info_len)
    throw std::invalid_argument("polar_encode: info length mismatch");
  BitVec u(cfg.mother_len, 0);
  for (std::size_t i = 0; i < cfg.info_len; ++i)
    u[cfg.info_positions[i]] = info[i] & 1u;
  polar_transform_inplace(u);
  // Shortened tail positions are structurally zero and not transmitted.
  BitVec out(cfg.coded_len);
  for (std::size_t i = 0; i < cfg.coded_len; ++i)
    out[i] = u[cfg.interleaver[i]];
  return out;
}

BitVec polar_decode(std::span<const double> llrs, const CodeConfig& cfg) {
  if (llrs.size() != cfg.coded_len)
    throw std::invalid_argument("polar_decode: LLR length mismatch");
  std::vector<double> mother(cfg.mother_len, kShortLlr);
  for (std::size_t i = 0; i < cfg.coded_len; ++i) {
    if (!std::isfinite(llrs[i]))
      throw std::invalid_argument("polar_decode: non-finite LLR");
    mother[cfg.interleaver[i]] = llrs[i];
  }
  SclDecoder dec(cfg);
  const BitVec u = dec.decode(mother);
  BitVec info(cfg.info_len);
  for (std::size_t i = 0; i < cfg.info_len; ++i)
    info[i] = u[cfg.info_positions[i]];
  return info;
}

}  // namespace rsma
