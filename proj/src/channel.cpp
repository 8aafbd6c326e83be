#include "csifb/channel.hpp"

#include <cmath>
#include <sstream>

namespace csifb {

void SystemConfig::validate() const {
  if (tx_antennas < 1 || subcarriers < 1 || pilot_subcarriers < 1 ||
      training_symbols < 1) {
    raise(ErrorCode::InvalidArgument, "all counts must be >= 1");
  }
  if (pilot_subcarriers > subcarriers) {
    raise(ErrorCode::InvalidArgument,
          "pilot_subcarriers must not exceed subcarriers");
  }
  if (!(snr_downlink > 0.0)) {
    raise(ErrorCode::InvalidArgument, "snr_downlink must be positive");
  }
  if (!(distortion_budget > 0.0)) {
    raise(ErrorCode::InvalidArgument, "distortion_budget must be positive");
  }
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    raise(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  }
}

ChannelModel ChannelModel::from_covariance(Matrix cov, double rank_tol) {
  ChannelModel model;
  model.spectrum = eigh(cov, rank_tol);  // validates Hermitian / PSD
  model.cov = std::move(cov);
  RealVector roots = model.spectrum.eigenvalues.cwiseSqrt();
  Matrix scaled = model.spectrum.eigenvectors * roots.asDiagonal();
  model.sqrt_cov = scaled * model.spectrum.eigenvectors.adjoint();
  model.sqrt_cov = 0.5 * (model.sqrt_cov + Matrix(model.sqrt_cov.adjoint()));
  return model;
}

ChannelModel make_identity_covariance(int dim) {
  if (dim < 1) raise(ErrorCode::InvalidArgument, "dimension must be >= 1");
  return ChannelModel::from_covariance(Matrix::Identity(dim, dim));
}

namespace {

Eigen::MatrixXd exponential_correlation(int n, double rho) {
  Eigen::MatrixXd corr(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      corr(i, j) = std::pow(rho, std::abs(i - j));
    }
  }
  return corr;
}

}  // namespace

ChannelModel make_kronecker_covariance(int tx_antennas, int subcarriers,
                                       double rho_spatial, double rho_freq) {
  if (tx_antennas < 1 || subcarriers < 1) {
    raise(ErrorCode::InvalidArgument, "dimensions must be >= 1");
  }
  if (!(rho_spatial >= 0.0 && rho_spatial < 1.0) ||
      !(rho_freq >= 0.0 && rho_freq < 1.0)) {
    raise(ErrorCode::InvalidCorrelation,
          "correlation coefficients must lie in [0, 1)");
  }
  const Eigen::MatrixXd spatial =
      exponential_correlation(tx_antennas, rho_spatial);
  const Eigen::MatrixXd freq = exponential_correlation(subcarriers, rho_freq);
  // Subcarrier-major stacking: the antenna block of subcarrier s occupies
  // rows s * tx_antennas ... (s + 1) * tx_antennas - 1.
  const int n = tx_antennas * subcarriers;
  Matrix cov(n, n);
  for (int sr = 0; sr < subcarriers; ++sr) {
    for (int sc = 0; sc < subcarriers; ++sc) {
      cov.block(sr * tx_antennas, sc * tx_antennas, tx_antennas, tx_antennas) =
          freq(sr, sc) * spatial;
    }
  }
  return ChannelModel::from_covariance(std::move(cov));
}

ChannelModel make_three_tier_covariance(int dim, double level_lo,
                                        double level_mid, double level_hi,
                                        double target_trace, Rng& rng) {
  if (dim < 1) raise(ErrorCode::InvalidArgument, "dimension must be >= 1");
  if (!(level_lo > 0.0 && level_lo < level_mid && level_mid < level_hi)) {
    std::ostringstream oss;
    oss << "tier levels must satisfy 0 < lo < mid < hi, got (" << level_lo
        << ", " << level_mid << ", " << level_hi << ")";
    raise(ErrorCode::TierLevelsNotOrdered, oss.str());
  }
  if (!(target_trace > 0.0)) {
    raise(ErrorCode::InvalidArgument, "target trace must be positive");
  }

  const int n_lo = (dim + 2) / 3;  // ceil(dim / 3)
  const int n_hi = (dim + 2) / 3;
  const int n_mid = dim - n_lo - n_hi;
  if (n_mid < 0) {
    raise(ErrorCode::InvalidArgument, "dimension too small for three tiers");
  }

  RealVector levels(dim);
  Index k = 0;
  for (int i = 0; i < n_hi; ++i) levels(k++) = level_hi;
  for (int i = 0; i < n_mid; ++i) levels(k++) = level_mid;
  for (int i = 0; i < n_lo; ++i) levels(k++) = level_lo;
  levels *= target_trace / levels.sum();

  // Haar-distributed eigenbasis from the QR of a complex Gaussian matrix,
  // with the R diagonal phases folded in so Q is unique.
  Matrix g(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) g(i, j) = rng.complex_gaussian(1.0);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }

  Matrix cov = q * levels.asDiagonal() * q.adjoint();
  cov = 0.5 * (cov + Matrix(cov.adjoint()));
  return ChannelModel::from_covariance(std::move(cov));
}

Vector sample_channel(const ChannelModel& model, Rng& rng) {
  if (model.cov.rows() == 0) {
    raise(ErrorCode::InvalidArgument, "sample_channel: empty model");
  }
  return model.sqrt_cov * rng.complex_gaussian_vector(model.dim(), 1.0);
}

}  // namespace csifb
