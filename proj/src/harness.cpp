#include "rsma/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

namespace rsma {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void parallel_for(std::size_t tasks, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads <= 1 || tasks <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(tasks));
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

FrameResult run_single_frame(const FrameContext& ctx, std::uint64_t seed) {
  const FrameGeometry& geom = *ctx.geom;
  const StreamConfigs& cfgs = *ctx.cfgs;
  std::mt19937_64 rng(seed);

  ChannelRealization ch;
  if (ctx.channel_seed) {
    std::mt19937_64 crng(*ctx.channel_seed);
    ch = generate_channel_pair(ctx.scenario, geom, ctx.sigma2, crng);
  } else {
    ch = generate_channel_pair(ctx.scenario, geom, ctx.sigma2, rng);
  }

  // Sounding pass for the CSI feedback loop when estimation is on. The
  // preamble does not depend on precoders or payload, so an empty frame works.
  ChannelEstimate est1, est2;
  if (!ctx.genie_csi) {
    const std::vector<cx> zeros(geom.data_cells(), cx{0.0, 0.0});
    const TxGrid sounding =
        assemble_grid(zeros, zeros, zeros, PrecoderSet{}, geom);
    auto [ys1, ys2] = apply_channel(sounding, ch, rng);
    est1 = estimate_channel(ys1, geom);
    est2 = estimate_channel(ys2, geom);
  }

  const SplitBookkeeping bk = make_bookkeeping(cfgs);
  const BitVec w1 = random_bits(bk.user_message_len(1), rng);
  const BitVec w2 = random_bits(bk.user_message_len(2), rng);
  const SplitMessages msgs = split_messages(w1, w2, bk);

  const auto& csi1 = ctx.genie_csi ? ch.h1 : est1.h_hat;
  const auto& csi2 = ctx.genie_csi ? ch.h2 : est2.h_hat;
  const auto d1 = data_bin_channel(csi1, geom);
  const auto d2 = data_bin_channel(csi2, geom);

  PrecoderSet wideband;
  std::vector<PrecoderSet> per_sc;
  TxGrid tx;
  if (ctx.per_subcarrier_precoding) {
    per_sc = design_precoders_per_subcarrier(d1, d2, ctx.t);
    tx = transmit(msgs, cfgs, per_sc, geom);
  } else {
    wideband = design_precoders(d1, d2, ctx.t);
    tx = transmit(msgs, cfgs, wideband, geom);
  }

  auto [y1, y2] = apply_channel(tx, ch, rng);

  FrameResult res;
  // Demapper-input SNR: noiseless received power over the data cells divided
  // by the cell noise variance.
  auto gamma_db = [&](const std::vector<std::array<cx, 2>>& h) {
    double acc = 0.0;
    for (std::size_t sym = 0; sym < geom.payload_symbols; ++sym)
      for (std::size_t bin : geom.data_bins) {
        const std::array<cx, 2> x{tx.at(0, geom.preamble_symbols + sym, bin),
                                  tx.at(1, geom.preamble_symbols + sym, bin)};
        acc += std::norm(dot_hx(h[bin], x));
      }
    acc /= static_cast<double>(geom.data_cells());
    return linear_to_db(acc / ctx.sigma2);
  };
  res.gamma_db_u1 = gamma_db(ch.h1);
  res.gamma_db_u2 = gamma_db(ch.h2);

  // Receivers read their own per-frame channel estimate when estimation is
  // on; with genie CSI they get the true channel and noise variance.
  ChannelEstimate rx_est1, rx_est2;
  if (!ctx.genie_csi) {
    rx_est1 = estimate_channel(y1, geom);
    rx_est2 = estimate_channel(y2, geom);
  }
  const auto& rxh1 = ctx.genie_csi ? ch.h1 : rx_est1.h_hat;
  const auto& rxh2 = ctx.genie_csi ? ch.h2 : rx_est2.h_hat;
  const double nv1 = ctx.genie_csi ? ctx.sigma2 : rx_est1.sigma2_hat;
  const double nv2 = ctx.genie_csi ? ctx.sigma2 : rx_est2.sigma2_hat;

  EffectiveGains gains1, gains2;
  if (ctx.per_subcarrier_precoding) {
    gains1 = effective_gains(rxh1, per_sc, 1, geom);
    gains2 = effective_gains(rxh2, per_sc, 2, geom);
  } else {
    gains1 = effective_gains(rxh1, wideband, 1, geom);
    gains2 = effective_gains(rxh2, wideband, 2, geom);
  }

  auto score = [&](const DecodedResult& r1, const DecodedResult& r2) {
    ReceiverOutcome o;
    o.err_c1 = count_bit_errors(r1.wc_hat, msgs.wc);
    o.err_c2 = count_bit_errors(r2.wc_hat, msgs.wc);
    o.err_p1 = count_bit_errors(r1.wp_hat, msgs.wp1);
    o.err_p2 = count_bit_errors(r2.wp_hat, msgs.wp2);
    o.c1_ok = o.err_c1 == 0;
    o.c2_ok = o.err_c2 == 0;
    o.p1_ok = o.err_p1 == 0;
    o.p2_ok = o.err_p2 == 0;
    o.err_w1 = count_bit_errors(combine_message(r1.wc_hat, r1.wp_hat, 1, bk), w1);
    o.err_w2 = count_bit_errors(combine_message(r2.wc_hat, r2.wp_hat, 2, bk), w2);
    return o;
  };

  const bool want_jd = ctx.receiver != ReceiverChoice::sic;
  const bool want_sic = ctx.receiver != ReceiverChoice::jd;
  if (want_jd)
    res.jd = score(jd_receive(y1, gains1, nv1, cfgs, 1, geom),
                   jd_receive(y2, gains2, nv2, cfgs, 2, geom));
  if (want_sic)
    res.sic = score(sic_receive(y1, gains1, nv1, cfgs, 1, geom),
                    sic_receive(y2, gains2, nv2, cfgs, 2, geom));
  return res;
}

namespace {

struct GridPoint {
  McsGroup group;
  double t = 0.0;
  double snr_db = 0.0;
};

std::vector<GridPoint> build_grid(const ExperimentConfig& cfg) {
  std::vector<std::pair<int, int>> privates;
  if (cfg.mcs_p1) {
    for (std::size_t i = 0; i < cfg.mcs_p1->size(); ++i)
      privates.emplace_back((*cfg.mcs_p1)[i], (*cfg.mcs_p2)[i]);
  } else {
    for (int p : cfg.mcs_private) privates.emplace_back(p, p);
  }
  std::vector<GridPoint> grid;
  for (double t : cfg.t_grid)
    for (double snr : cfg.snr_db)
      for (int c : cfg.mcs_common)
        for (auto [p1, p2] : privates)
          grid.push_back({McsGroup{c, p1, p2}, t, snr});
  return grid;
}

// Stream configs cache keyed by the MCS triple; built up-front so the
// parallel phase is read-only.
struct ConfigCache {
  std::map<std::array<int, 3>, StreamConfigs> by_group;

  const StreamConfigs& get(const McsGroup& g) const {
    return by_group.at({g.common, g.p1, g.p2});
  }
  void prepare(const McsGroup& g, const FrameGeometry& geom,
               std::size_t list_size) {
    const std::array<int, 3> key{g.common, g.p1, g.p2};
    if (!by_group.count(key))
      by_group.emplace(key, make_stream_configs(g, geom, list_size));
  }
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" + dir +
                             "': " + ec.message());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
  return f;
}

}  // namespace

SweepReport run_mcs_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const FrameGeometry geom = FrameGeometry::standard();
  const auto grid = build_grid(cfg);
  ConfigCache cache;
  for (const auto& p : grid) cache.prepare(p.group, geom, cfg.list_size);

  const std::size_t runs = cfg.runs_per_point;
  std::vector<FrameResult> results(grid.size() * runs);
  parallel_for(results.size(), cfg.threads, [&](std::size_t task) {
    const std::size_t pi = task / runs;
    const std::size_t run = task % runs;
    FrameContext ctx;
    ctx.geom = &geom;
    ctx.cfgs = &cache.get(grid[pi].group);
    ctx.scenario = cfg.scenario.target();
    ctx.t = grid[pi].t;
    ctx.sigma2 = db_to_linear(-grid[pi].snr_db);
    ctx.genie_csi = cfg.genie_csi;
    ctx.per_subcarrier_precoding = cfg.per_subcarrier_precoding;
    ctx.receiver = cfg.receiver;
    results[task] = run_single_frame(ctx, cfg.master_seed + run);
  });

  SweepReport report;
  report.scenario_name = cfg.scenario.name();
  report.master_seed = cfg.master_seed;
  report.config_hash = config_hash(cfg);
  for (std::size_t pi = 0; pi < grid.size(); ++pi) {
    auto make_row = [&](const char* name, auto pick) {
      McsSweepRow row;
      row.receiver = name;
      row.group = grid[pi].group;
      row.t = grid[pi].t;
      row.snr_db = grid[pi].snr_db;
      double gsum = 0.0;
      for (std::size_t r = 0; r < runs; ++r) {
        const FrameResult& fr = results[pi * runs + r];
        const ReceiverOutcome& o = *pick(fr);
        row.tally.add_run(o.c1_ok, o.p1_ok, o.c2_ok, o.p2_ok);
        gsum += 0.5 * (fr.gamma_db_u1 + fr.gamma_db_u2);
      }
      row.gamma_db = gsum / static_cast<double>(runs);
      row.throughput_bps = empirical_throughput(row.tally, row.group,
                                                geom.effective_bandwidth_hz);
      report.rows.push_back(std::move(row));
    };
    if (cfg.receiver != ReceiverChoice::sic)
      make_row("jd", [](const FrameResult& fr) { return &*fr.jd; });
    if (cfg.receiver != ReceiverChoice::jd)
      make_row("sic", [](const FrameResult& fr) { return &*fr.sic; });
  }
  return report;
}

namespace {

struct StreamDef {
  const char* name;
  std::uint64_t bits_per_run;
  std::function<std::uint64_t(const ReceiverOutcome&)> errors;
};

std::vector<StreamDef> ber_streams(const StreamConfigs& cfgs,
                                   const SplitBookkeeping& bk) {
  const std::uint64_t kc = cfgs.code_c.info_len;
  const std::uint64_t kp1 = cfgs.code_1.info_len;
  const std::uint64_t kp2 = cfgs.code_2.info_len;
  const std::uint64_t kw = bk.user_message_len(1) + bk.user_message_len(2);
  return {
      {"common", 2 * kc,
       [](const ReceiverOutcome& o) { return o.err_c1 + o.err_c2; }},
      {"private1", kp1, [](const ReceiverOutcome& o) { return o.err_p1; }},
      {"private2", kp2, [](const ReceiverOutcome& o) { return o.err_p2; }},
      {"private", kp1 + kp2,
       [](const ReceiverOutcome& o) { return o.err_p1 + o.err_p2; }},
      {"combined", kw,
       [](const ReceiverOutcome& o) { return o.err_w1 + o.err_w2; }},
  };
}

BerCurve series_to_curve(const std::string& stream,
                         const std::vector<double>& gamma,
                         const std::vector<double>& ber) {
  BerCurve c;
  c.stream = stream;
  for (std::size_t i = 0; i < gamma.size(); ++i)
    c.points.push_back({gamma[i], ber[i]});
  return c;
}

}  // namespace

BerCurve curve_of(const BerReport& report, const std::string& receiver,
                  const std::string& stream) {
  for (const auto& rx : report.receivers) {
    if (rx.receiver != receiver) continue;
    for (const auto& s : rx.streams)
      if (s.stream == stream) return series_to_curve(stream, report.gamma_db, s.ber);
  }
  throw std::invalid_argument("curve_of: no series for " + receiver + "/" + stream);
}

BerReport run_ber_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const FrameGeometry geom = FrameGeometry::standard();
  const McsGroup group{cfg.ber_mcs_common, cfg.ber_mcs_private,
                       cfg.ber_mcs_private};
  const StreamConfigs cfgs = make_stream_configs(group, geom, cfg.list_size);
  const SplitBookkeeping bk = make_bookkeeping(cfgs);
  const auto defs = ber_streams(cfgs, bk);

  const std::size_t points = cfg.ber_snr_db.size();
  const std::size_t runs = cfg.runs_per_point;
  std::vector<FrameResult> results(points * runs);
  parallel_for(results.size(), cfg.threads, [&](std::size_t task) {
    const std::size_t pi = task / runs;
    const std::size_t run = task % runs;
    FrameContext ctx;
    ctx.geom = &geom;
    ctx.cfgs = &cfgs;
    ctx.scenario = cfg.scenario.target();
    ctx.t = cfg.t_grid.front();
    ctx.sigma2 = db_to_linear(-cfg.ber_snr_db[pi]);
    ctx.genie_csi = cfg.genie_csi;
    ctx.per_subcarrier_precoding = cfg.per_subcarrier_precoding;
    ctx.receiver = cfg.receiver;
    if (cfg.ber_fixed_channel) ctx.channel_seed = cfg.master_seed ^ 0xC4A11ull;
    results[task] = run_single_frame(ctx, cfg.master_seed + run);
  });

  BerReport report;
  report.scenario_name = cfg.scenario.name();
  report.group = group;
  report.master_seed = cfg.master_seed;
  report.config_hash = config_hash(cfg);
  report.snr_db = cfg.ber_snr_db;
  report.gamma_db.resize(points);
  for (std::size_t pi = 0; pi < points; ++pi) {
    double g = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      const FrameResult& fr = results[pi * runs + r];
      g += 0.5 * (fr.gamma_db_u1 + fr.gamma_db_u2);
    }
    report.gamma_db[pi] = g / static_cast<double>(runs);
  }

  auto collect = [&](const char* name, auto pick) {
    BerReceiverSeries rx;
    rx.receiver = name;
    for (const auto& def : defs) {
      BerStreamSeries s;
      s.stream = def.name;
      s.bits_per_run = def.bits_per_run;
      s.run_errors.assign(points, std::vector<std::uint64_t>(runs, 0));
      s.errors.assign(points, 0);
      s.ber.assign(points, 0.0);
      for (std::size_t pi = 0; pi < points; ++pi) {
        for (std::size_t r = 0; r < runs; ++r) {
          const std::uint64_t e = def.errors(*pick(results[pi * runs + r]));
          s.run_errors[pi][r] = e;
          s.errors[pi] += e;
        }
        s.ber[pi] = static_cast<double>(s.errors[pi]) /
                    static_cast<double>(s.bits_per_run * runs);
      }
      rx.streams.push_back(std::move(s));
    }
    report.receivers.push_back(std::move(rx));
  };
  if (cfg.receiver != ReceiverChoice::sic)
    collect("jd", [](const FrameResult& fr) { return &*fr.jd; });
  if (cfg.receiver != ReceiverChoice::jd)
    collect("sic", [](const FrameResult& fr) { return &*fr.sic; });

  // Paired bootstrap over runs: one index resample per replicate, applied to
  // every SNR point and both receivers, preserving the common-random-number
  // pairing. The gamma axis stays at its full-sample values.
  if (cfg.receiver == ReceiverChoice::both) {
    const auto* jd_rx = &report.receivers[0];
    const auto* sic_rx = &report.receivers[1];
    std::mt19937_64 boot_rng(cfg.master_seed ^ 0xB007ull);
    std::uniform_int_distribution<std::size_t> pick_run(0, runs - 1);
    for (double beta : cfg.ber_beta) {
      for (std::size_t si = 0; si < defs.size(); ++si) {
        ThresholdEstimate th;
        th.stream = defs[si].name;
        th.beta = beta;
        th.replicates = cfg.bootstrap_replicates;
        auto gain_from = [&](const std::vector<std::vector<std::uint64_t>>& ej,
                             const std::vector<std::vector<std::uint64_t>>& es,
                             std::span<const std::size_t> idx,
                             double* out) -> bool {
          const double denom = static_cast<double>(defs[si].bits_per_run) *
                               static_cast<double>(idx.size());
          std::vector<double> bj(points), bs(points);
          for (std::size_t pi = 0; pi < points; ++pi) {
            std::uint64_t aj = 0, as = 0;
            for (std::size_t r : idx) {
              aj += ej[pi][r];
              as += es[pi][r];
            }
            bj[pi] = static_cast<double>(aj) / denom;
            bs[pi] = static_cast<double>(as) / denom;
          }
          try {
            const BerCurve cj = series_to_curve("jd", report.gamma_db, bj);
            const BerCurve cs = series_to_curve("sic", report.gamma_db, bs);
            *out = threshold_gain(cs, cj, beta);
            return true;
          } catch (const std::out_of_range&) {
            return false;
          }
        };

        std::vector<std::size_t> full(runs);
        for (std::size_t r = 0; r < runs; ++r) full[r] = r;
        const auto& ej = jd_rx->streams[si].run_errors;
        const auto& es = sic_rx->streams[si].run_errors;
        double point_gain = 0.0;
        const bool have_point = gain_from(ej, es, full, &point_gain);
        th.gain_db = have_point ? point_gain : 0.0;

        std::vector<double> gains;
        gains.reserve(cfg.bootstrap_replicates);
        std::vector<std::size_t> idx(runs);
        for (std::size_t b = 0; b < cfg.bootstrap_replicates; ++b) {
          for (std::size_t r = 0; r < runs; ++r) idx[r] = pick_run(boot_rng);
          double g = 0.0;
          if (gain_from(ej, es, idx, &g)) gains.push_back(g);
        }
        th.evaluable = gains.size();
        if (!gains.empty()) {
          std::sort(gains.begin(), gains.end());
          auto pct = [&](double q) {
            const std::size_t i = static_cast<std::size_t>(
                q * static_cast<double>(gains.size() - 1));
            return gains[i];
          };
          th.ci_lo = pct(0.025);
          th.ci_hi = pct(0.975);
          th.q05 = pct(0.05);
        }
        if (have_point) report.thresholds.push_back(std::move(th));
      }
    }
  }
  return report;
}

CalibrationReport run_channel_calibration(const ExperimentConfig& cfg,
                                          bool all_cases) {
  const FrameGeometry geom = FrameGeometry::standard();
  CalibrationReport report;
  report.master_seed = cfg.master_seed;
  std::vector<std::pair<std::string, ScenarioTarget>> scenarios;
  if (all_cases) {
    for (int c = 1; c <= 6; ++c)
      scenarios.emplace_back("case" + std::to_string(c), case_target(c));
  } else {
    scenarios.emplace_back(cfg.scenario.name(), cfg.scenario.target());
  }
  for (const auto& [name, target] : scenarios) {
    CalibrationRow row;
    row.scenario_name = name;
    row.alpha_target_db = target.alpha_db;
    row.rho_target = target.rho;
    row.runs = cfg.runs_per_point;
    double asum = 0.0, rsum = 0.0;
    for (std::size_t i = 0; i < cfg.runs_per_point; ++i) {
      std::mt19937_64 rng(cfg.master_seed + i);
      const auto ch = generate_channel_pair(target, geom, 1.0, rng);
      const auto h1 = data_bin_channel(ch.h1, geom);
      const auto h2 = data_bin_channel(ch.h2, geom);
      asum += measure_alpha(h1, h2);
      rsum += measure_rho(h1, h2);
    }
    row.alpha_mean_db = asum / static_cast<double>(cfg.runs_per_point);
    row.rho_mean = rsum / static_cast<double>(cfg.runs_per_point);
    row.pass = std::abs(row.alpha_mean_db - row.alpha_target_db) <= 0.5 &&
               std::abs(row.rho_mean - row.rho_target) <= 0.05;
    report.rows.push_back(row);
  }
  return report;
}

namespace {

json meta_json(const ExperimentConfig& cfg, std::uint64_t hash) {
  json m;
  m["version"] = kVersion;
  m["seed"] = cfg.master_seed;
  m["config_hash"] = hash;
  m["scenario"] = cfg.scenario.name();
  m["receiver"] = to_string(cfg.receiver);
  m["genie_csi"] = cfg.genie_csi;
  m["runs_per_point"] = cfg.runs_per_point;
  m["list_size"] = cfg.list_size;
  return m;
}

}  // namespace

std::vector<std::string> write_mcs_report(const SweepReport& report,
                                          const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  std::vector<std::string> written;
  if (cfg.write_csv) {
    const std::string path = cfg.out_dir + "/mcs_sweep.csv";
    auto f = open_out(path);
    f << "case,receiver,mcs_c,mcs_1,mcs_2,t,snr_db,D_sc,D_s1,D_s2,T_runs,"
         "throughput_mbps,u1_q_ff,u1_q_fo,u1_q_of,u1_q_oo,u2_q_ff,u2_q_fo,"
         "u2_q_of,u2_q_oo\n";
    for (const auto& r : report.rows) {
      f << report.scenario_name << ',' << r.receiver << ',' << r.group.common
        << ',' << r.group.p1 << ',' << r.group.p2 << ',' << fmt(r.t) << ','
        << fmt(r.snr_db) << ',' << r.tally.d_sc << ',' << r.tally.d_s1 << ','
        << r.tally.d_s2 << ',' << r.tally.runs << ','
        << fmt(r.throughput_bps / 1e6);
      for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t q = 0; q < 4; ++q) f << ',' << r.tally.quadrants[u][q];
      f << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
    written.push_back(path);
  }
  if (cfg.write_json) {
    const std::string path = cfg.out_dir + "/mcs_sweep.json";
    json j;
    j["meta"] = meta_json(cfg, report.config_hash);
    j["rows"] = json::array();
    for (const auto& r : report.rows) {
      json row;
      row["receiver"] = r.receiver;
      row["mcs"] = {r.group.common, r.group.p1, r.group.p2};
      row["t"] = r.t;
      row["snr_db"] = r.snr_db;
      row["gamma_db"] = r.gamma_db;
      row["runs"] = r.tally.runs;
      row["d_sc"] = r.tally.d_sc;
      row["d_s1"] = r.tally.d_s1;
      row["d_s2"] = r.tally.d_s2;
      row["throughput_mbps"] = r.throughput_bps / 1e6;
      row["quadrants"] = {{"user1", r.tally.quadrants[0]},
                          {"user2", r.tally.quadrants[1]}};
      j["rows"].push_back(std::move(row));
    }
    auto f = open_out(path);
    f << j.dump(2) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
    written.push_back(path);
  }
  return written;
}

std::vector<std::string> write_ber_report(const BerReport& report,
                                          const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  std::vector<std::string> written;
  if (cfg.write_csv) {
    const std::string path = cfg.out_dir + "/ber_sweep.csv";
    auto f = open_out(path);
    f << "case,receiver,stream,snr_db,gamma_db,ber,bit_errors,total_bits\n";
    for (const auto& rx : report.receivers)
      for (const auto& s : rx.streams)
        for (std::size_t pi = 0; pi < report.snr_db.size(); ++pi)
          f << report.scenario_name << ',' << rx.receiver << ',' << s.stream
            << ',' << fmt(report.snr_db[pi]) << ',' << fmt(report.gamma_db[pi])
            << ',' << fmt(s.ber[pi]) << ',' << s.errors[pi] << ','
            << s.bits_per_run * cfg.runs_per_point << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
    written.push_back(path);
  }
  if (cfg.write_json) {
    const std::string path = cfg.out_dir + "/ber_sweep.json";
    json j;
    j["meta"] = meta_json(cfg, report.config_hash);
    j["mcs"] = {report.group.common, report.group.p1, report.group.p2};
    j["snr_db"] = report.snr_db;
    j["gamma_db"] = report.gamma_db;
    j["receivers"] = json::array();
    for (const auto& rx : report.receivers) {
      json r;
      r["receiver"] = rx.receiver;
      r["streams"] = json::array();
      for (const auto& s : rx.streams) {
        json sj;
        sj["stream"] = s.stream;
        sj["ber"] = s.ber;
        sj["bit_errors"] = s.errors;
        sj["bits_per_run"] = s.bits_per_run;
        r["streams"].push_back(std::move(sj));
      }
      j["receivers"].push_back(std::move(r));
    }
    j["threshold_gains"] = json::array();
    for (const auto& th : report.thresholds) {
      json t;
      t["stream"] = th.stream;
      t["beta"] = th.beta;
      t["gain_db"] = th.gain_db;
      t["ci_lo"] = th.ci_lo;
      t["ci_hi"] = th.ci_hi;
      t["q05"] = th.q05;
      t["evaluable"] = th.evaluable;
      t["replicates"] = th.replicates;
      j["threshold_gains"].push_back(std::move(t));
    }
    auto f = open_out(path);
    f << j.dump(2) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
    written.push_back(path);
  }
  return written;
}

std::vector<std::string> write_calibration_report(
    const CalibrationReport& report, const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  std::vector<std::string> written;
  if (cfg.write_csv) {
    const std::string path = cfg.out_dir + "/calibration.csv";
    auto f = open_out(path);
    f << "case,alpha_target_db,alpha_mean_db,rho_target,rho_mean,runs,pass\n";
    for (const auto& r : report.rows)
      f << r.scenario_name << ',' << fmt(r.alpha_target_db) << ','
        << fmt(r.alpha_mean_db) << ',' << fmt(r.rho_target) << ','
        << fmt(r.rho_mean) << ',' << r.runs << ',' << (r.pass ? 1 : 0) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
    written.push_back(path);
  }
  if (cfg.write_json) {
    const std::string path = cfg.out_dir + "/calibration.json";
    json j;
    j["meta"] = meta_json(cfg, config_hash(cfg));
    j["rows"] = json::array();
    for (const auto& r : report.rows) {
      json row;
      row["case"] = r.scenario_name;
      row["alpha_target_db"] = r.alpha_target_db;
      row["alpha_mean_db"] = r.alpha_mean_db;
      row["rho_target"] = r.rho_target;
      row["rho_mean"] = r.rho_mean;
      row["runs"] = r.runs;
      row["pass"] = r.pass;
      j["rows"].push_back(std::move(row));
    }
    auto f = open_out(path);
    f << j.dump(2) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
    written.push_back(path);
  }
  return written;
}

}  // namespace rsma
