#include "rsma/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rsma {

const char* to_string(ReceiverChoice r) {
  switch (r) {
    case ReceiverChoice::jd: return "jd";
    case ReceiverChoice::sic: return "sic";
    case ReceiverChoice::both: return "both";
  }
  return "?";
}

ReceiverChoice receiver_from_string(const std::string& s) {
  if (s == "jd") return ReceiverChoice::jd;
  if (s == "sic") return ReceiverChoice::sic;
  if (s == "both") return ReceiverChoice::both;
  throw std::invalid_argument("receiver must be jd, sic or both, got '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad_field(const std::string& section, const std::string& key,
                            const std::string& what, const std::string& got) {
  throw std::invalid_argument("config: [" + section + "]." + key + ": " + what +
                              ", got '" + got + "'");
}

long long parse_int(const std::string& sec, const std::string& key,
                    const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long n = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return n;
  } catch (...) {
    bad_field(sec, key, "expected integer", v);
  }
}

double parse_double(const std::string& sec, const std::string& key,
                    const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    bad_field(sec, key, "expected number", v);
  }
}

bool parse_bool(const std::string& sec, const std::string& key,
                const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  bad_field(sec, key, "expected on/off", v);
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& sec, const std::string& key,
                          const std::string& v, F item) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) bad_field(sec, key, "empty list element", v);
    out.push_back(item(sec, key, tok));
  }
  if (out.empty()) bad_field(sec, key, "expected non-empty list", v);
  return out;
}

std::vector<int> parse_int_list(const std::string& sec, const std::string& key,
                                const std::string& v) {
  return parse_list<int>(sec, key, v, [](auto& s, auto& k, auto& t) {
    return static_cast<int>(parse_int(s, k, t));
  });
}

std::vector<double> parse_double_list(const std::string& sec,
                                      const std::string& key,
                                      const std::string& v) {
  return parse_list<double>(sec, key, v, [](auto& s, auto& k, auto& t) {
    return parse_double(s, k, t);
  });
}

std::string fmt_d(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F fmt) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt(v[i]);
  }
  return s;
}

}  // namespace

IniData parse_ini(const std::string& text) {
  IniData data;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      data[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    data[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return data;
}

IniData load_ini_file(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_ini(ss.str());
}

void apply_ini(ExperimentConfig& cfg, const IniData& ini) {
  for (const auto& [sec, kv] : ini) {
    for (const auto& [key, val] : kv) {
      auto is = [&](const char* s, const char* k) {
        return sec == s && key == k;
      };
      if (is("scenario", "case"))
        cfg.scenario.case_index = static_cast<int>(parse_int(sec, key, val));
      else if (is("scenario", "alpha_db"))
        cfg.scenario.alpha_db = parse_double(sec, key, val);
      else if (is("scenario", "rho"))
        cfg.scenario.rho = parse_double(sec, key, val);
      else if (is("scenario", "taps"))
        cfg.scenario.taps = static_cast<std::size_t>(parse_int(sec, key, val));
      else if (is("scenario", "pdp_decay"))
        cfg.scenario.pdp_decay = parse_double(sec, key, val);
      else if (is("sweep", "mcs_common"))
        cfg.mcs_common = parse_int_list(sec, key, val);
      else if (is("sweep", "mcs_private"))
        cfg.mcs_private = parse_int_list(sec, key, val);
      else if (is("sweep", "mcs_p1"))
        cfg.mcs_p1 = parse_int_list(sec, key, val);
      else if (is("sweep", "mcs_p2"))
        cfg.mcs_p2 = parse_int_list(sec, key, val);
      else if (is("sweep", "snr_db"))
        cfg.snr_db = parse_double_list(sec, key, val);
      else if (is("sweep", "t"))
        cfg.t_grid = parse_double_list(sec, key, val);
      else if (is("ber", "mcs_common"))
        cfg.ber_mcs_common = static_cast<int>(parse_int(sec, key, val));
      else if (is("ber", "mcs_private"))
        cfg.ber_mcs_private = static_cast<int>(parse_int(sec, key, val));
      else if (is("ber", "snr_db"))
        cfg.ber_snr_db = parse_double_list(sec, key, val);
      else if (is("ber", "beta"))
        cfg.ber_beta = parse_double_list(sec, key, val);
      else if (is("ber", "fixed_channel"))
        cfg.ber_fixed_channel = parse_bool(sec, key, val);
      else if (is("run", "runs"))
        cfg.runs_per_point = static_cast<std::size_t>(parse_int(sec, key, val));
      else if (is("run", "receiver"))
        cfg.receiver = receiver_from_string(val);
      else if (is("run", "seed"))
        cfg.master_seed = static_cast<std::uint64_t>(parse_int(sec, key, val));
      else if (is("run", "genie_csi"))
        cfg.genie_csi = parse_bool(sec, key, val);
      else if (is("run", "per_subcarrier_precoding"))
        cfg.per_subcarrier_precoding = parse_bool(sec, key, val);
      else if (is("run", "list_size"))
        cfg.list_size = static_cast<std::size_t>(parse_int(sec, key, val));
      else if (is("run", "threads"))
        cfg.threads = static_cast<unsigned>(parse_int(sec, key, val));
      else if (is("run", "bootstrap_replicates"))
        cfg.bootstrap_replicates =
            static_cast<std::size_t>(parse_int(sec, key, val));
      else if (is("output", "dir"))
        cfg.out_dir = val;
      else if (is("output", "csv"))
        cfg.write_csv = parse_bool(sec, key, val);
      else if (is("output", "json"))
        cfg.write_json = parse_bool(sec, key, val);
      else
        throw std::invalid_argument("config: unknown key [" + sec + "]." + key);
    }
  }
}

void ExperimentConfig::validate() const {
  if (scenario.case_index < 0 || scenario.case_index > 6)
    throw std::invalid_argument("config: [scenario].case must be 0..6");
  if (scenario.case_index == 0) {
    if (scenario.rho < 0.0 || scenario.rho > 1.0)
      throw std::invalid_argument("config: [scenario].rho must be in [0,1]");
    if (scenario.taps < 1 || scenario.taps > 16)
      throw std::invalid_argument("config: [scenario].taps must be 1..16");
    if (!(scenario.pdp_decay >= 0.0))
      throw std::invalid_argument("config: [scenario].pdp_decay must be >= 0");
  }
  auto check_mcs_list = [](const char* name, const std::vector<int>& v) {
    if (v.empty())
      throw std::invalid_argument(std::string("config: ") + name +
                                  " must be non-empty");
    for (int i : v)
      if (i < 0 || i >= kMcsCount)
        throw std::invalid_argument(std::string("config: ") + name +
                                    " entries must be 0..5");
  };
  check_mcs_list("[sweep].mcs_common", mcs_common);
  check_mcs_list("[sweep].mcs_private", mcs_private);
  if (mcs_p1) check_mcs_list("[sweep].mcs_p1", *mcs_p1);
  if (mcs_p2) check_mcs_list("[sweep].mcs_p2", *mcs_p2);
  if ((mcs_p1 && !mcs_p2) || (!mcs_p1 && mcs_p2))
    throw std::invalid_argument(
        "config: [sweep].mcs_p1 and mcs_p2 must be set together");
  if (mcs_p1 && mcs_p1->size() != mcs_p2->size())
    throw std::invalid_argument(
        "config: [sweep].mcs_p1 and mcs_p2 must have equal length (paired)");
  if (ber_mcs_common < 0 || ber_mcs_common >= kMcsCount ||
      ber_mcs_private < 0 || ber_mcs_private >= kMcsCount)
    throw std::invalid_argument("config: [ber].mcs_* must be 0..5");
  if (ber_snr_db.empty())
    throw std::invalid_argument("config: [ber].snr_db must be non-empty");
  for (double b : ber_beta)
    if (!(b > 0.0 && b < 0.5))
      throw std::invalid_argument("config: [ber].beta entries must be in (0,0.5)");
  if (runs_per_point < 1)
    throw std::invalid_argument("config: [run].runs must be >= 1");
  if (snr_db.empty())
    throw std::invalid_argument("config: [sweep].snr_db must be non-empty");
  if (t_grid.empty())
    throw std::invalid_argument("config: [sweep].t must be non-empty");
  for (double t : t_grid)
    if (t < 0.0 || t > 1.0)
      throw std::invalid_argument("config: [sweep].t entries must be in [0,1]");
  if (list_size < 1 || list_size > 64)
    throw std::invalid_argument("config: [run].list_size must be 1..64");
  if (bootstrap_replicates < 10)
    throw std::invalid_argument("config: [run].bootstrap_replicates must be >= 10");
}

std::string dump_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[scenario]\n";
  os << "case = " << cfg.scenario.case_index << "\n";
  os << "alpha_db = " << fmt_d(cfg.scenario.alpha_db) << "\n";
  os << "rho = " << fmt_d(cfg.scenario.rho) << "\n";
  os << "taps = " << cfg.scenario.taps << "\n";
  os << "pdp_decay = " << fmt_d(cfg.scenario.pdp_decay) << "\n";
  os << "\n[sweep]\n";
  auto fmt_i = [](int v) { return std::to_string(v); };
  os << "mcs_common = " << join(cfg.mcs_common, fmt_i) << "\n";
  os << "mcs_private = " << join(cfg.mcs_private, fmt_i) << "\n";
  if (cfg.mcs_p1) os << "mcs_p1 = " << join(*cfg.mcs_p1, fmt_i) << "\n";
  if (cfg.mcs_p2) os << "mcs_p2 = " << join(*cfg.mcs_p2, fmt_i) << "\n";
  os << "snr_db = " << join(cfg.snr_db, fmt_d) << "\n";
  os << "t = " << join(cfg.t_grid, fmt_d) << "\n";
  os << "\n[ber]\n";
  os << "mcs_common = " << cfg.ber_mcs_common << "\n";
  os << "mcs_private = " << cfg.ber_mcs_private << "\n";
  os << "snr_db = " << join(cfg.ber_snr_db, fmt_d) << "\n";
  os << "beta = " << join(cfg.ber_beta, fmt_d) << "\n";
  os << "fixed_channel = " << (cfg.ber_fixed_channel ? "on" : "off") << "\n";
  os << "\n[run]\n";
  os << "runs = " << cfg.runs_per_point << "\n";
  os << "receiver = " << to_string(cfg.receiver) << "\n";
  os << "seed = " << cfg.master_seed << "\n";
  os << "genie_csi = " << (cfg.genie_csi ? "on" : "off") << "\n";
  os << "per_subcarrier_precoding = "
     << (cfg.per_subcarrier_precoding ? "on" : "off") << "\n";
  os << "list_size = " << cfg.list_size << "\n";
  os << "threads = " << cfg.threads << "\n";
  os << "bootstrap_replicates = " << cfg.bootstrap_replicates << "\n";
  os << "\n[output]\n";
  os << "dir = " << cfg.out_dir << "\n";
  os << "csv = " << (cfg.write_csv ? "on" : "off") << "\n";
  os << "json = " << (cfg.write_json ? "on" : "off") << "\n";
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // Hash only fields that determine results: output routing and worker count
  // must not change what gets computed.
  ExperimentConfig canonical = cfg;
  canonical.out_dir.clear();
  canonical.write_csv = true;
  canonical.write_json = true;
  canonical.threads = 0;
  return fnv1a64(dump_config(canonical));
}

}  // namespace rsma
