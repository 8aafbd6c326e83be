#pragma once

#include <string>

#include "csifb/experiments.hpp"

namespace csifb {

/// Documented CSV schema for sweep results, one row per grid point. All
/// rates are in nats, doubles carry 17 significant digits, invalid bounds
/// are written as `nan`. The header is stable:
///
/// training_symbols,source_delta_mean,source_delta_stderr,mmse_mean,
/// mmse_stderr,distortion_delta_mean,distortion_delta_stderr,total_mean,
/// total_stderr,gap_mean,gap_stderr,source_delta_lo,source_delta_hi,
/// mmse_lo,mmse_hi,distortion_delta_lo,distortion_delta_hi,overall_lo,
/// overall_hi,direct_rate,skipped,epsilon_violation_fraction,
/// extended_fraction,sandwich_ok
std::string sweep_csv(const SweepResult& sweep);
void write_sweep_csv(const SweepResult& sweep, const std::string& path);

/// Self-contained SVG: log-log plot of the mean rate gap vs the training
/// length with 3-sigma error bars and the deterministic bound band.
std::string sweep_svg(const SweepResult& sweep);
void write_sweep_svg(const SweepResult& sweep, const std::string& path);

}  // namespace csifb
