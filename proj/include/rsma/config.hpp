#pragma once

#include <map>
#include <optional>

#include "rsma/channel.hpp"
#include "rsma/mcs.hpp"

namespace rsma {

enum class ReceiverChoice { jd, sic, both };

const char* to_string(ReceiverChoice r);
ReceiverChoice receiver_from_string(const std::string& s);

// Scenario selection: a named lab case or explicit targets.
struct ScenarioConfig {
  int case_index = 0;  // 0 = custom targets below
  double alpha_db = 0.0;
  double rho = 0.5;
  std::size_t taps = 4;
  double pdp_decay = 2.0;

  ScenarioTarget target() const {
    return case_index > 0 ? case_target(case_index)
                          : ScenarioTarget{alpha_db, rho, taps, 0, pdp_decay};
  }
  std::string name() const {
    return case_index > 0 ? "case" + std::to_string(case_index) : "custom";
  }
};

struct ExperimentConfig {
  ScenarioConfig scenario;

  // MCS sweep grid (indices into the 6-entry grid). Private lists apply to
  // both users unless mcs_p1/mcs_p2 are set explicitly.
  std::vector<int> mcs_common = {2, 3, 4, 5};
  std::vector<int> mcs_private = {0, 1, 2, 3, 4, 5};
  std::optional<std::vector<int>> mcs_p1;
  std::optional<std::vector<int>> mcs_p2;

  // BER sweep settings. With fixed_channel on, every run of the sweep sees
  // one frozen realization of the scenario (bench-style measurement) while
  // noise and payload stay fresh per run.
  int ber_mcs_common = 3;   // QPSK 3/4
  int ber_mcs_private = 2;  // QPSK 1/2
  std::vector<double> ber_snr_db = {6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  std::vector<double> ber_beta = {1e-3, 1e-5};
  bool ber_fixed_channel = true;

  std::size_t runs_per_point = 75;
  std::vector<double> snr_db = {20.0};
  std::vector<double> t_grid = {0.8};
  ReceiverChoice receiver = ReceiverChoice::both;
  std::uint64_t master_seed = 1;
  bool genie_csi = true;
  bool per_subcarrier_precoding = false;
  std::size_t list_size = 8;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::size_t bootstrap_replicates = 1000;

  std::string out_dir = "out";
  bool write_csv = true;
  bool write_json = true;

  void validate() const;  // throws std::invalid_argument with field names
};

// Minimal INI: [section] headers, key = value lines, '#' or ';' comments.
using IniData = std::map<std::string, std::map<std::string, std::string>>;

IniData parse_ini(const std::string& text);
IniData load_ini_file(const std::string& path);

// Applies file values on top of cfg; unknown keys are an error so typos in
// config files fail loudly.
void apply_ini(ExperimentConfig& cfg, const IniData& ini);

// Canonical dump in the same INI format (stable ordering; reparseable).
std::string dump_config(const ExperimentConfig& cfg);

std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace rsma
