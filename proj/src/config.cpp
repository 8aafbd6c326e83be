#include "csifb/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "csifb/matrix_io.hpp"

namespace csifb {

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct RawEntry {
  std::string value;
  int line = 0;
};

[[noreturn]] void parse_fail(const std::string& name, int line,
                             const std::string& message) {
  std::ostringstream oss;
  oss << name << ":" << line << ": " << message;
  raise(ErrorCode::ParseError, oss.str());
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

class Entries {
 public:
  Entries(std::map<std::string, RawEntry> raw, std::string name)
      : raw_(std::move(raw)), name_(std::move(name)) {}

  bool has(const std::string& key) const { return raw_.count(key) > 0; }

  const RawEntry& require(const std::string& key) const {
    auto it = raw_.find(key);
    if (it == raw_.end()) {
      raise(ErrorCode::ParseError,
            name_ + ": missing required key '" + key + "'");
    }
    return it->second;
  }

  long long get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    return parse_int(raw_.at(key));
  }
  long long require_int(const std::string& key) const {
    return parse_int(require(key));
  }
  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_double(raw_.at(key));
  }
  double require_double(const std::string& key) const {
    return parse_double(require(key));
  }
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const RawEntry& e = raw_.at(key);
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument(e.value);
      return v;
    } catch (const std::exception&) {
      parse_fail(name_, e.line, "expected an unsigned integer, got '" + e.value + "'");
    }
  }
  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    return has(key) ? raw_.at(key).value : fallback;
  }

  std::vector<int> get_int_list(const std::string& key) const {
    std::vector<int> out;
    if (!has(key)) return out;
    const RawEntry& e = raw_.at(key);
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        parse_fail(name_, e.line, "empty entry in list '" + key + "'");
      }
      try {
        std::size_t used = 0;
        const long long v = std::stoll(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        out.push_back(static_cast<int>(v));
      } catch (const std::exception&) {
        parse_fail(name_, e.line, "expected an integer list, got '" + item + "'");
      }
    }
    if (out.empty()) {
      parse_fail(name_, e.line, "list '" + key + "' is empty");
    }
    return out;
  }

  int line_of(const std::string& key) const {
    return has(key) ? raw_.at(key).line : 0;
  }
  const std::string& name() const { return name_; }

 private:
  long long parse_int(const RawEntry& e) const {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument(e.value);
      return v;
    } catch (const std::exception&) {
      parse_fail(name_, e.line, "expected an integer, got '" + e.value + "'");
    }
  }
  double parse_double(const RawEntry& e) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument(e.value);
      return v;
    } catch (const std::exception&) {
      parse_fail(name_, e.line, "expected a number, got '" + e.value + "'");
    }
  }

  std::map<std::string, RawEntry> raw_;
  std::string name_;
};

const std::map<std::string, int>& known_keys() {
  static const std::map<std::string, int> keys = {
      {"antennas", 0},        {"subcarriers", 0},  {"pilot_subcarriers", 0},
      {"training_symbols", 0}, {"snr_db", 0},      {"distortion", 0},
      {"epsilon", 0},         {"covariance", 0},   {"rho_spatial", 0},
      {"rho_freq", 0},        {"tier_lo", 0},      {"tier_mid", 0},
      {"tier_hi", 0},         {"tier_trace", 0},   {"cov_seed", 0},
      {"cov_file", 0},        {"training_grid", 0}, {"trials", 0},
      {"seed", 0},            {"out_dir", 0},      {"rate_unit", 0}};
  return keys;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& name) {
  std::map<std::string, RawEntry> raw;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      parse_fail(name, line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) parse_fail(name, line_no, "empty key");
    if (value.empty()) parse_fail(name, line_no, "empty value for '" + key + "'");
    if (known_keys().count(key) == 0) {
      parse_fail(name, line_no, "unknown key '" + key + "'");
    }
    if (raw.count(key) > 0) {
      parse_fail(name, line_no, "duplicate key '" + key + "' (first on line " +
                                    std::to_string(raw[key].line) + ")");
    }
    raw[key] = RawEntry{value, line_no};
  }

  const Entries entries(std::move(raw), name);
  ExperimentConfig cfg;

  cfg.system.tx_antennas = static_cast<int>(entries.require_int("antennas"));
  cfg.system.subcarriers = static_cast<int>(entries.require_int("subcarriers"));
  cfg.system.pilot_subcarriers = static_cast<int>(
      entries.get_int("pilot_subcarriers", cfg.system.subcarriers));
  const double snr_db = entries.require_double("snr_db");
  cfg.system.snr_downlink = std::pow(10.0, snr_db / 10.0);
  cfg.system.distortion_budget = entries.require_double("distortion");
  cfg.system.epsilon = entries.get_double("epsilon", 0.5);

  cfg.training_grid = entries.get_int_list("training_grid");
  if (entries.has("training_symbols")) {
    cfg.system.training_symbols =
        static_cast<int>(entries.require_int("training_symbols"));
  } else if (!cfg.training_grid.empty()) {
    cfg.system.training_symbols = cfg.training_grid.front();
  } else {
    raise(ErrorCode::ParseError,
          name + ": needs 'training_symbols' or 'training_grid'");
  }
  for (std::size_t i = 0; i < cfg.training_grid.size(); ++i) {
    if (cfg.training_grid[i] < 1) {
      parse_fail(name, entries.line_of("training_grid"),
                 "training_grid entries must be >= 1");
    }
    if (i > 0 && cfg.training_grid[i] <= cfg.training_grid[i - 1]) {
      parse_fail(name, entries.line_of("training_grid"),
                 "training_grid must be strictly increasing");
    }
  }

  const std::string kind = entries.get_string("covariance", "identity");
  if (kind == "identity") {
    cfg.cov_kind = CovarianceKind::Identity;
  } else if (kind == "kronecker") {
    cfg.cov_kind = CovarianceKind::Kronecker;
  } else if (kind == "three-tier") {
    cfg.cov_kind = CovarianceKind::ThreeTier;
  } else if (kind == "file") {
    cfg.cov_kind = CovarianceKind::File;
  } else {
    parse_fail(name, entries.line_of("covariance"),
               "covariance must be identity, kronecker, three-tier or file");
  }

  cfg.rho_spatial = entries.get_double("rho_spatial", 0.0);
  cfg.rho_freq = entries.get_double("rho_freq", 0.0);
  cfg.tier_lo = entries.get_double("tier_lo", 0.1);
  cfg.tier_mid = entries.get_double("tier_mid", 1.0);
  cfg.tier_hi = entries.get_double("tier_hi", 3.0);
  cfg.tier_trace = entries.get_double("tier_trace", 0.0);
  cfg.cov_seed = entries.get_u64("cov_seed", 1);
  cfg.cov_file = entries.get_string("cov_file", "");
  if (cfg.cov_kind == CovarianceKind::File && cfg.cov_file.empty()) {
    raise(ErrorCode::ParseError,
          name + ": covariance = file needs a 'cov_file' path");
  }

  cfg.trials = entries.get_int("trials", 10000);
  if (cfg.trials < 2) {
    parse_fail(name, entries.line_of("trials"), "trials must be >= 2");
  }
  cfg.seed = entries.get_u64("seed", 42);
  cfg.out_dir = entries.get_string("out_dir", ".");

  const std::string unit = entries.get_string("rate_unit", "nats");
  if (unit == "nats") {
    cfg.rate_in_bits = false;
  } else if (unit == "bits") {
    cfg.rate_in_bits = true;
  } else {
    parse_fail(name, entries.line_of("rate_unit"),
               "rate_unit must be 'nats' or 'bits'");
  }

  try {
    cfg.system.validate();
  } catch (const Error& e) {
    raise(ErrorCode::ParseError, name + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoError, "cannot open config file " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

ChannelModel build_covariance(const ExperimentConfig& cfg) {
  switch (cfg.cov_kind) {
    case CovarianceKind::Identity:
      return make_identity_covariance(cfg.system.dim());
    case CovarianceKind::Kronecker:
      return make_kronecker_covariance(cfg.system.tx_antennas,
                                       cfg.system.subcarriers, cfg.rho_spatial,
                                       cfg.rho_freq);
    case CovarianceKind::ThreeTier: {
      Rng rng(cfg.cov_seed);
      const double trace =
          cfg.tier_trace > 0.0 ? cfg.tier_trace : cfg.system.dim();
      return make_three_tier_covariance(cfg.system.dim(), cfg.tier_lo,
                                        cfg.tier_mid, cfg.tier_hi, trace, rng);
    }
    case CovarianceKind::File: {
      Matrix cov = load_matrix_text(cfg.cov_file);
      if (cov.rows() != cfg.system.dim()) {
        std::ostringstream oss;
        oss << "covariance file " << cfg.cov_file << " has dimension "
            << cov.rows() << ", configuration needs " << cfg.system.dim();
        raise(ErrorCode::DimensionMismatch, oss.str());
      }
      return ChannelModel::from_covariance(std::move(cov));
    }
  }
  raise(ErrorCode::InvalidArgument, "unknown covariance kind");
}

double rate_scale(const ExperimentConfig& cfg) {
  return cfg.rate_in_bits ? 1.0 / kLn2 : 1.0;
}

}  // namespace csifb
