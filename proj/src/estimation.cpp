#include "csifb/estimation.hpp"

#include <cmath>
#include <sstream>

namespace csifb {

namespace {

// Relative disagreement tolerated between the two distortion routes before
// the result is flagged.
constexpr double kDistortionCheckTol = 1e-9;

}  // namespace

MmseCovariances mmse_covariances(const ChannelModel& model,
                                 const Matrix& gram_channel, double rank_tol) {
  const Index n = model.dim();
  if (gram_channel.rows() != n || gram_channel.cols() != n) {
    raise(ErrorCode::DimensionMismatch,
          "mmse_covariances: Gram matrix dimension mismatch");
  }

  // (I + A A^H) has eigenvalues >= 1, so the Cholesky solve is benign; a
  // failure here indicates a corrupted input.
  Matrix shifted = Matrix::Identity(n, n) + 0.5 * (gram_channel + gram_channel.adjoint());
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) {
    raise(ErrorCode::SingularSystem,
          "mmse_covariances: Cholesky factorization of (I + A A^H) failed");
  }
  const Matrix inv_shifted = llt.solve(Matrix::Identity(n, n));

  MmseCovariances out;
  Matrix est = model.sqrt_cov * (Matrix::Identity(n, n) - inv_shifted) *
               model.sqrt_cov;
  out.est_cov = 0.5 * (est + Matrix(est.adjoint()));
  out.est_spectrum = eigh(out.est_cov, rank_tol);
  out.estimate_rank = out.est_spectrum.rank;

  out.d_mmse = model.trace() - out.est_spectrum.trace();
  // tr(C (I + A A^H)^{-1}) without forming the product.
  out.d_mmse_trace_form =
      model.cov.transpose().cwiseProduct(inv_shifted).sum().real();
  const double ref = std::max(std::abs(out.d_mmse_trace_form), 1e-300);
  out.consistent =
      std::abs(out.d_mmse - out.d_mmse_trace_form) <= kDistortionCheckTol * ref;
  if (out.d_mmse < 0.0) out.d_mmse = 0.0;
  return out;
}

MmseResult mmse(const ChannelModel& model, const EffectiveMatrix& eff,
                const PilotMatrix& pilot) {
  if (pilot.matrix.rows() != model.dim()) {
    raise(ErrorCode::DimensionMismatch, "mmse: pilot dimension mismatch");
  }
  MmseCovariances cov = mmse_covariances(model, eff.gram_channel);

  MmseResult result;
  result.est_cov = std::move(cov.est_cov);
  result.est_spectrum = std::move(cov.est_spectrum);
  result.d_mmse = cov.d_mmse;
  result.d_mmse_trace_form = cov.d_mmse_trace_form;
  result.consistent = cov.consistent;
  result.estimate_rank = cov.estimate_rank;

  // The filter C P (P^H C P + I)^{-1} equals (C - est_cov) P; the error
  // covariance route keeps every per-trial solve at N x N.
  Matrix err_raw = model.cov - result.est_cov;
  result.filter = err_raw * pilot.matrix;

  Spectrum err_spectrum = eigh(0.5 * (err_raw + Matrix(err_raw.adjoint())));
  RealVector clamped = err_spectrum.eigenvalues.cwiseMax(0.0);
  result.err_cov = err_spectrum.eigenvectors * clamped.asDiagonal() *
                   err_spectrum.eigenvectors.adjoint();
  result.err_cov = 0.5 * (result.err_cov + Matrix(result.err_cov.adjoint()));
  return result;
}

Vector estimate(const MmseResult& result, const Vector& observation) {
  if (observation.size() != result.filter.cols()) {
    std::ostringstream oss;
    oss << "estimate: observation length " << observation.size()
        << " != " << result.filter.cols();
    raise(ErrorCode::DimensionMismatch, oss.str());
  }
  return result.filter * observation;
}

EntropySet entropies(const ChannelModel& model, const Spectrum& gram_spectrum,
                     Index observations, const Spectrum& est_spectrum) {
  EntropySet set;
  set.rank_channel = model.rank();
  set.h_channel =
      static_cast<double>(set.rank_channel) * kLogPiE + pseudo_logdet(model.spectrum);

  // The noisy covariance A^H A + I is full rank: the n0 - N unit
  // eigenvalues contribute nothing to the log-determinant.
  set.rank_training = observations;
  double logdet_noisy = 0.0;
  for (Index i = 0; i < gram_spectrum.eigenvalues.size(); ++i) {
    logdet_noisy += std::log1p(gram_spectrum.eigenvalues(i));
  }
  set.h_training = static_cast<double>(observations) * kLogPiE + logdet_noisy;

  set.rank_training_noiseless = gram_spectrum.rank;
  set.h_training_noiseless =
      static_cast<double>(gram_spectrum.rank) * kLogPiE +
      pseudo_logdet(gram_spectrum);

  set.rank_estimate = est_spectrum.rank;
  set.h_estimate = static_cast<double>(est_spectrum.rank) * kLogPiE +
                   pseudo_logdet(est_spectrum);
  return set;
}

EntropySet entropies(const ChannelModel& model, const EffectiveMatrix& eff,
                     const MmseResult& result) {
  return entropies(model, eigh(eff.gram_channel), eff.matrix.cols(),
                   result.est_spectrum);
}

}  // namespace csifb
