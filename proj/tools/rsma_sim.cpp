// Command-line front end: MCS sweeps, BER sweeps, channel-generator
// calibration and a loopback demo over the link-level simulator.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "rsma/harness.hpp"

namespace {

using namespace rsma;

struct CommonFlags {
  std::string config_path;
  std::string receiver;
  std::string format;
  std::string genie;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int case_index = -1;
  long long runs = -1;
  std::string out_dir;
  unsigned threads = 0;
  bool threads_set = false;
  bool dump = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "Config file (INI format)");
  app->add_option("--seed", f.seed, "Master seed")->each([&](const std::string&) {
    f.seed_set = true;
  });
  app->add_option("--case", f.case_index, "Scenario preset 1..6 (0 = custom)")
      ->check(CLI::Range(0, 6));
  app->add_option("--receiver", f.receiver, "jd, sic or both")
      ->check(CLI::IsMember({"jd", "sic", "both"}));
  app->add_option("--runs", f.runs, "Monte-Carlo runs per grid point")
      ->check(CLI::PositiveNumber);
  app->add_option("--out", f.out_dir, "Output directory");
  app->add_option("--format", f.format, "csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  app->add_option("--genie-csi", f.genie, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  app->add_option("--threads", f.threads, "Worker threads (0 = auto)")
      ->each([&](const std::string&) { f.threads_set = true; });
  app->add_flag("--dump-config", f.dump, "Print the effective config and exit");
}

ExperimentConfig make_config(const CommonFlags& f) {
  ExperimentConfig cfg;
  if (!f.config_path.empty()) apply_ini(cfg, load_ini_file(f.config_path));
  if (f.seed_set) cfg.master_seed = f.seed;
  if (f.case_index >= 0) cfg.scenario.case_index = f.case_index;
  if (!f.receiver.empty()) cfg.receiver = receiver_from_string(f.receiver);
  if (f.runs > 0) cfg.runs_per_point = static_cast<std::size_t>(f.runs);
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (!f.format.empty()) {
    cfg.write_csv = f.format == "csv" || f.format == "both";
    cfg.write_json = f.format == "json" || f.format == "both";
  }
  if (!f.genie.empty()) cfg.genie_csi = f.genie == "on";
  if (f.threads_set) cfg.threads = f.threads;
  cfg.validate();
  return cfg;
}

int cmd_sweep_mcs(const CommonFlags& f) {
  const ExperimentConfig cfg = make_config(f);
  if (f.dump) {
    std::cout << dump_config(cfg);
    return 0;
  }
  const SweepReport report = run_mcs_sweep(cfg);
  for (const auto& path : write_mcs_report(report, cfg))
    std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_sweep_ber(const CommonFlags& f) {
  const ExperimentConfig cfg = make_config(f);
  if (f.dump) {
    std::cout << dump_config(cfg);
    return 0;
  }
  const BerReport report = run_ber_sweep(cfg);
  for (const auto& th : report.thresholds)
    std::printf("threshold gain %-9s beta=%-7g %+.3f dB  (95%% CI [%+.3f, %+.3f])\n",
                th.stream.c_str(), th.beta, th.gain_db, th.ci_lo, th.ci_hi);
  for (const auto& path : write_ber_report(report, cfg))
    std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_calibrate(const CommonFlags& f, bool all_cases) {
  const ExperimentConfig cfg = make_config(f);
  if (f.dump) {
    std::cout << dump_config(cfg);
    return 0;
  }
  const CalibrationReport report =
      run_channel_calibration(cfg, all_cases || f.case_index <= 0);
  bool all_pass = true;
  for (const auto& r : report.rows) {
    std::printf("%-8s alpha %+7.2f dB (target %+7.2f)  rho %.3f (target %.3f)  %s\n",
                r.scenario_name.c_str(), r.alpha_mean_db, r.alpha_target_db,
                r.rho_mean, r.rho_target, r.pass ? "pass" : "FAIL");
    all_pass = all_pass && r.pass;
  }
  for (const auto& path : write_calibration_report(report, cfg))
    std::cout << "wrote " << path << "\n";
  return all_pass ? 0 : 2;
}

int cmd_demo(const CommonFlags& f) {
  ExperimentConfig cfg = make_config(f);
  if (f.dump) {
    std::cout << dump_config(cfg);
    return 0;
  }
  const FrameGeometry geom = FrameGeometry::standard();
  const McsGroup group{3, 2, 2};
  const StreamConfigs cfgs = make_stream_configs(group, geom, cfg.list_size);
  FrameContext ctx;
  ctx.geom = &geom;
  ctx.cfgs = &cfgs;
  ctx.scenario = cfg.scenario.target();
  ctx.t = cfg.t_grid.front();
  ctx.sigma2 = db_to_linear(-cfg.snr_db.front());
  ctx.genie_csi = cfg.genie_csi;
  ctx.receiver = ReceiverChoice::both;
  const FrameResult res = run_single_frame(ctx, cfg.master_seed);
  auto show = [&](const char* name, const ReceiverOutcome& o) {
    OutcomeTally tally;
    tally.add_run(o.c1_ok, o.p1_ok, o.c2_ok, o.p2_ok);
    std::printf(
        "%-4s common u1:%s u2:%s  private u1:%s u2:%s  throughput %.2f Mbps\n",
        name, o.c1_ok ? "ok" : "fail", o.c2_ok ? "ok" : "fail",
        o.p1_ok ? "ok" : "fail", o.p2_ok ? "ok" : "fail",
        empirical_throughput(tally, group, geom.effective_bandwidth_hz) / 1e6);
  };
  std::printf("loopback frame: scenario %s, SNR %.1f dB, gamma u1 %.2f dB u2 %.2f dB\n",
              cfg.scenario.name().c_str(), cfg.snr_db.front(), res.gamma_db_u1,
              res.gamma_db_u2);
  show("jd", *res.jd);
  show("sic", *res.sic);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-user MISO RSMA link-level simulator"};
  app.require_subcommand(1);

  CommonFlags f_mcs, f_ber, f_cal, f_demo;
  bool cal_all = false;

  auto* mcs = app.add_subcommand("sweep-mcs", "MCS grid throughput sweep");
  add_common(mcs, f_mcs);
  auto* ber = app.add_subcommand("sweep-ber", "Coded BER vs demapper-input SNR");
  add_common(ber, f_ber);
  auto* cal = app.add_subcommand("calibrate-channel",
                                 "Channel generator alpha/rho check");
  add_common(cal, f_cal);
  cal->add_flag("--all-cases", cal_all, "Calibrate all six presets");
  auto* demo = app.add_subcommand("demo-loopback", "Single-frame demo");
  add_common(demo, f_demo);

  CLI11_PARSE(app, argc, argv);

  try {
    if (mcs->parsed()) return cmd_sweep_mcs(f_mcs);
    if (ber->parsed()) return cmd_sweep_ber(f_ber);
    if (cal->parsed()) return cmd_calibrate(f_cal, cal_all);
    if (demo->parsed()) return cmd_demo(f_demo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
