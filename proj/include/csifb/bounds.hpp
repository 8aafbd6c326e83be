#pragma once

#include <string>
#include <utility>

#include "csifb/channel.hpp"

namespace csifb {

/// One side of a deterministic bound. When the hypotheses behind the
/// formula do not hold (e.g. not enough training symbols), `valid` is
/// false and `why_invalid` names the failing requirement.
struct BoundValue {
  double value = 0.0;
  bool valid = false;
  std::string why_invalid;
};

/// Deterministic lower/upper bounds on the expected per-pilot quantities:
/// the rate gain from encoding the estimate, the estimation distortion,
/// the rate cost of the tightened budget, and their sum (the expected
/// overall-rate gap above the baseline). All rates in nats.
struct BoundSet {
  BoundValue source_delta_lo, source_delta_hi;
  BoundValue mmse_lo, mmse_hi;
  BoundValue distortion_delta_lo, distortion_delta_hi;
  BoundValue overall_lo, overall_hi;
};

/// Bounds on the expected rate gain E[source_delta]. The lower bound
/// needs pilots on all subcarriers, a full-rank covariance and
/// training_symbols >= tx_antennas; the upper bound additionally needs
/// training_symbols >= tx_antennas + 2.
std::pair<BoundValue, BoundValue> bound_source_delta(const SystemConfig& cfg,
                                                     const ChannelModel& model);

/// Bounds on the expected estimation distortion E[d_mmse]. The upper
/// bound needs training_symbols > tx_antennas.
std::pair<BoundValue, BoundValue> bound_mmse(const SystemConfig& cfg,
                                             const ChannelModel& model);

/// Bounds on the expected rate cost E[distortion_delta]. The lower bound
/// needs d > the mmse lower bound; the upper one inherits the mmse upper
/// bound requirements and the epsilon slack.
std::pair<BoundValue, BoundValue> bound_distortion_delta(
    const SystemConfig& cfg, const ChannelModel& model);

BoundSet evaluate_bounds(const SystemConfig& cfg, const ChannelModel& model);

/// First-order (1/training_symbols) coefficients of the expected
/// quantities above, fully determined by the configuration and the
/// channel spectrum. Requires an invertible covariance.
struct AsymptoticCoefficients {
  double source_lo = 0.0;
  double source_hi = 0.0;
  double mmse_slope = 0.0;  // distortion units x training symbols
  double distortion_lo = 0.0;
  double distortion_hi = 0.0;
  double overall_lo = 0.0;
  double overall_hi = 0.0;
};

AsymptoticCoefficients asymptotic_coefficients(const SystemConfig& cfg,
                                               const ChannelModel& model);

/// E[log det] of a complex Wishart matrix with n degrees of freedom and
/// m x m scale Sigma, given log det(Sigma): a digamma sum, in nats.
double wishart_logdet_mean(int m, int n, double sigma_logdet);

/// Scalar multipliers of the identity for E[(G G^H)^{-1}] and
/// E[(G G^H)^{-2}] when G is m x n with i.i.d. CN(0, p) entries.
/// Requires n > m + 1 so both denominators are positive.
struct WishartInverseMoments {
  double inv_scale = 0.0;
  double inv_sq_scale = 0.0;
};
WishartInverseMoments wishart_inverse_moments(int m, int n, double p);

}  // namespace csifb
