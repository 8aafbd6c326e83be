#pragma once

#include <cstdint>

#include "csifb/numerics.hpp"

namespace csifb {

/// Static description of the downlink training setup. SNR is linear and
/// the distortion budget is in channel-energy units.
struct SystemConfig {
  int tx_antennas = 1;        // transmit antennas at the base station
  int subcarriers = 1;        // OFDM subcarriers carrying the channel
  int pilot_subcarriers = 1;  // subcarriers that actually carry pilots
  int training_symbols = 1;   // pilot symbols per pilot subcarrier
  double snr_downlink = 1.0;  // linear downlink SNR
  double distortion_budget = 1.0;  // end-to-end squared-error budget d
  double epsilon = 0.5;            // slack in (0,1) for the upper rate bound

  /// Stacked channel dimension (antennas x subcarriers).
  int dim() const { return tx_antennas * subcarriers; }
  /// Total training observations (symbols x pilot subcarriers).
  int observations() const { return training_symbols * pilot_subcarriers; }
  /// Per-entry pilot variance implied by the power constraint.
  double pilot_power() const { return snr_downlink / tx_antennas; }

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

/// Channel prior: covariance of the stacked channel vector together with
/// its eigendecomposition and Hermitian square root.
struct ChannelModel {
  Matrix cov;        // N x N Hermitian PSD
  Spectrum spectrum; // of cov
  Matrix sqrt_cov;   // Hermitian square root, sqrt_cov * sqrt_cov == cov

  Index dim() const { return cov.rows(); }
  Index rank() const { return spectrum.rank; }
  double trace() const { return spectrum.trace(); }

  /// Validates Hermitian/PSD structure and precomputes the decomposition.
  static ChannelModel from_covariance(Matrix cov,
                                      double rank_tol = kDefaultRankTol);
};

/// cov = I_N.
ChannelModel make_identity_covariance(int dim);

/// Exponential correlation across antennas (rho_spatial^|i-j|) and across
/// subcarriers (rho_freq^|i-j|), combined per the subcarrier-major channel
/// stacking. Correlations must lie in [0, 1).
ChannelModel make_kronecker_covariance(int tx_antennas, int subcarriers,
                                       double rho_spatial, double rho_freq);

/// Spectrum with three prescribed tiers: ceil(N/3) eigenvalues at level_lo,
/// ceil(N/3) at level_hi, the rest at level_mid, rotated by a random
/// unitary basis and scaled so the trace equals target_trace. Requires
/// 0 < level_lo < level_mid < level_hi.
ChannelModel make_three_tier_covariance(int dim, double level_lo,
                                        double level_mid, double level_hi,
                                        double target_trace, Rng& rng);

/// One channel realization H = cov^{1/2} g with g standard complex normal.
Vector sample_channel(const ChannelModel& model, Rng& rng);

}  // namespace csifb
