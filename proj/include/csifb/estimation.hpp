#pragma once

#include "csifb/pilots.hpp"

namespace csifb {

/// Covariance-level pieces of the conditional-mean estimator: the estimate
/// covariance, its spectrum, and the estimation distortion. The distortion
/// is computed two ways (trace of the error covariance and the direct
/// trace identity through (I + A A^H)^{-1}); `d_mmse` is the former,
/// `d_mmse_trace_form` the latter, and `consistent` records whether they
/// agree to 1e-9 relative.
struct MmseCovariances {
  Matrix est_cov;        // N x N Hermitian PSD
  Spectrum est_spectrum; // of est_cov
  double d_mmse = 0.0;
  double d_mmse_trace_form = 0.0;
  bool consistent = true;
  Index estimate_rank = 0;
};

/// Estimator statistics from the channel-side Gram matrix A A^H alone.
/// This is the hot path: everything is N x N regardless of the number of
/// training symbols.
MmseCovariances mmse_covariances(const ChannelModel& model,
                                 const Matrix& gram_channel,
                                 double rank_tol = kDefaultRankTol);

/// Full conditional-mean estimator, including the error covariance and the
/// linear filter mapping the observation (Y^H) to the estimate.
struct MmseResult {
  Matrix est_cov;
  Matrix err_cov;  // PSD-projected channel-minus-estimate covariance
  Matrix filter;   // N x n0
  Spectrum est_spectrum;
  double d_mmse = 0.0;
  double d_mmse_trace_form = 0.0;
  bool consistent = true;
  Index estimate_rank = 0;
};

MmseResult mmse(const ChannelModel& model, const EffectiveMatrix& eff,
                const PilotMatrix& pilot);

/// Apply the estimator filter to one observation (length n0).
Vector estimate(const MmseResult& result, const Vector& observation);

/// Differential entropies (nats) of the channel, the noisy and noiseless
/// training observations, and the estimate, each as
/// rank * log(pi e) + log pseudo-determinant of its covariance.
struct EntropySet {
  double h_channel = 0.0;             // h(H)
  double h_training = 0.0;            // h(Y | pilots)
  double h_training_noiseless = 0.0;  // h(Y | pilots) without receiver noise
  double h_estimate = 0.0;            // h(S | pilots)
  Index rank_channel = 0;
  Index rank_training = 0;
  Index rank_training_noiseless = 0;
  Index rank_estimate = 0;
};

EntropySet entropies(const ChannelModel& model, const EffectiveMatrix& eff,
                     const MmseResult& result);
EntropySet entropies(const ChannelModel& model, const Spectrum& gram_spectrum,
                     Index observations, const Spectrum& est_spectrum);

}  // namespace csifb
