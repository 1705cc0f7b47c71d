#pragma once

#include <functional>

#include "rsma/config.hpp"
#include "rsma/metrics.hpp"
#include "rsma/transceiver.hpp"

namespace rsma {

inline constexpr const char* kVersion = "0.1.0";

// Decode outcome of one receiver on one frame, against ground truth.
struct ReceiverOutcome {
  bool c1_ok = false, p1_ok = false;
  bool c2_ok = false, p2_ok = false;
  std::uint64_t err_c1 = 0, err_c2 = 0;  // common info-bit errors per user
  std::uint64_t err_p1 = 0, err_p2 = 0;  // private info-bit errors
  std::uint64_t err_w1 = 0, err_w2 = 0;  // reassembled user-message errors
};

struct FrameResult {
  std::optional<ReceiverOutcome> jd;
  std::optional<ReceiverOutcome> sic;
  double gamma_db_u1 = 0.0;  // measured demapper-input SNR
  double gamma_db_u2 = 0.0;
};

struct FrameContext {
  const FrameGeometry* geom = nullptr;
  const StreamConfigs* cfgs = nullptr;
  ScenarioTarget scenario;
  double t = 0.6;
  double sigma2 = 1.0;
  bool genie_csi = true;
  bool per_subcarrier_precoding = false;
  ReceiverChoice receiver = ReceiverChoice::both;
  // When set, the channel comes from its own fixed-seed stream while noise
  // and payload still follow the per-run seed (fixed-realization sweeps).
  std::optional<std::uint64_t> channel_seed;
};

// One end-to-end frame: channel draw, (optional) sounding + estimation,
// precoding, transmit, receive with the selected receiver chains. Both
// receivers see the identical channel and noise realization. Deterministic
// given the seed.
FrameResult run_single_frame(const FrameContext& ctx, std::uint64_t seed);

struct McsSweepRow {
  std::string receiver;
  McsGroup group;
  double t = 0.0;
  double snr_db = 0.0;
  OutcomeTally tally;
  double throughput_bps = 0.0;
  double gamma_db = 0.0;
};

struct SweepReport {
  std::string scenario_name;
  std::uint64_t master_seed = 0;
  std::uint64_t config_hash = 0;
  std::string version = kVersion;
  std::vector<McsSweepRow> rows;
};

SweepReport run_mcs_sweep(const ExperimentConfig& cfg);

struct BerStreamSeries {
  std::string stream;
  std::vector<double> ber;                           // per SNR point
  std::vector<std::uint64_t> errors;                 // per point
  std::uint64_t bits_per_run = 0;
  std::vector<std::vector<std::uint64_t>> run_errors;  // [point][run]
};

struct BerReceiverSeries {
  std::string receiver;
  std::vector<BerStreamSeries> streams;
};

struct ThresholdEstimate {
  std::string stream;
  double beta = 0.0;
  double gain_db = 0.0;  // gamma_SIC(beta) - gamma_JD(beta)
  double ci_lo = 0.0;    // bootstrap 2.5th percentile
  double ci_hi = 0.0;    // bootstrap 97.5th percentile
  double q05 = 0.0;      // one-sided 95% lower bound
  std::size_t evaluable = 0;
  std::size_t replicates = 0;
};

struct BerReport {
  std::string scenario_name;
  McsGroup group;
  std::uint64_t master_seed = 0;
  std::uint64_t config_hash = 0;
  std::string version = kVersion;
  std::vector<double> snr_db;
  std::vector<double> gamma_db;  // measured axis, one per SNR point
  std::vector<BerReceiverSeries> receivers;
  std::vector<ThresholdEstimate> thresholds;  // when both receivers ran
};

BerReport run_ber_sweep(const ExperimentConfig& cfg);

BerCurve curve_of(const BerReport& report, const std::string& receiver,
                  const std::string& stream);

struct CalibrationRow {
  std::string scenario_name;
  double alpha_target_db = 0.0, alpha_mean_db = 0.0;
  double rho_target = 0.0, rho_mean = 0.0;
  std::size_t runs = 0;
  bool pass = false;  // |d alpha| <= 0.5 dB and |d rho| <= 0.05
};

struct CalibrationReport {
  std::uint64_t master_seed = 0;
  std::vector<CalibrationRow> rows;
};

// Channel-generator check over `runs` realizations per scenario.
CalibrationReport run_channel_calibration(const ExperimentConfig& cfg,
                                          bool all_cases);

// Emit reports; returns the written file paths. CSV column order is fixed and
// documented in the README; identical inputs produce byte-identical files.
std::vector<std::string> write_mcs_report(const SweepReport& report,
                                          const ExperimentConfig& cfg);
std::vector<std::string> write_ber_report(const BerReport& report,
                                          const ExperimentConfig& cfg);
std::vector<std::string> write_calibration_report(
    const CalibrationReport& report, const ExperimentConfig& cfg);

// Deterministic worker pool: results must be written to per-task slots.
void parallel_for(std::size_t tasks, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace rsma
