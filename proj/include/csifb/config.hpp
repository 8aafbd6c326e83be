#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csifb/channel.hpp"

namespace csifb {

enum class CovarianceKind { Identity, Kronecker, ThreeTier, File };

/// Parsed experiment description. The on-disk format is `key = value`
/// lines with `#` comments; unknown or duplicate keys are hard errors and
/// every invariant is enforced at parse time. SNR is given in dB in the
/// file and stored linear here.
struct ExperimentConfig {
  SystemConfig system;

  CovarianceKind cov_kind = CovarianceKind::Identity;
  double rho_spatial = 0.0;
  double rho_freq = 0.0;
  double tier_lo = 0.1;
  double tier_mid = 1.0;
  double tier_hi = 3.0;
  double tier_trace = 0.0;  // 0 means "use the channel dimension"
  std::uint64_t cov_seed = 1;
  std::string cov_file;

  std::vector<int> training_grid;  // for sweeps; may be empty otherwise
  std::int64_t trials = 10000;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  bool rate_in_bits = false;
};

ExperimentConfig parse_config_file(const std::string& path);
/// `name` is used in error messages in place of a file path.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& name = "<config>");

/// Build the channel covariance the configuration describes.
ChannelModel build_covariance(const ExperimentConfig& cfg);

/// Multiplier applied to rates for display: 1 for nats, 1/ln 2 for bits.
double rate_scale(const ExperimentConfig& cfg);

}  // namespace csifb
