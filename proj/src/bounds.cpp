#include "csifb/bounds.hpp"

#include <cmath>
#include <sstream>

namespace csifb {

namespace {

BoundValue ok(double value) {
  BoundValue b;
  b.value = value;
  b.valid = true;
  return b;
}

BoundValue invalid(const std::string& why) {
  BoundValue b;
  b.valid = false;
  b.why_invalid = why;
  return b;
}

/// The bound theorems assume full-band pilots, a full-rank covariance and
/// enough training symbols. Empty string when everything holds.
std::string shared_requirement_failure(const SystemConfig& cfg,
                                       const ChannelModel& model) {
  if (cfg.pilot_subcarriers != cfg.subcarriers) {
    return "requires pilots on all subcarriers (pilot_subcarriers == subcarriers)";
  }
  if (model.rank() != model.dim()) {
    std::ostringstream oss;
    oss << "requires a full-rank covariance (rank " << model.rank() << " of "
        << model.dim() << ")";
    return oss.str();
  }
  if (cfg.training_symbols < cfg.tx_antennas) {
    std::ostringstream oss;
    oss << "requires training_symbols >= tx_antennas (" << cfg.training_symbols
        << " < " << cfg.tx_antennas << ")";
    return oss.str();
  }
  if (model.dim() != cfg.dim()) {
    std::ostringstream oss;
    oss << "model dimension " << model.dim() << " does not match config N = "
        << cfg.dim();
    return oss.str();
  }
  return "";
}

double inverse_trace(const ChannelModel& model) {
  double sum = 0.0;
  for (Index i = 0; i < model.rank(); ++i) {
    sum += 1.0 / model.spectrum.eigenvalues(i);
  }
  return sum;
}

}  // namespace

std::pair<BoundValue, BoundValue> bound_source_delta(const SystemConfig& cfg,
                                                     const ChannelModel& model) {
  cfg.validate();
  const std::string shared = shared_requirement_failure(cfg, model);
  if (!shared.empty()) return {invalid(shared), invalid(shared)};

  const double m_t = cfg.tx_antennas;
  const double n_c = cfg.subcarriers;
  const double n_t = cfg.training_symbols;
  const double snr = cfg.snr_downlink;

  // Lower bound: exact expected log det of the pilot Gram (digamma sum)
  // against the Jensen bound on the noisy side.
  double logdet_cov = pseudo_logdet(model.spectrum);
  double logdet_shifted = 0.0;
  const double alpha = snr * n_t / m_t;
  for (Index i = 0; i < model.spectrum.eigenvalues.size(); ++i) {
    logdet_shifted += std::log1p(alpha * model.spectrum.eigenvalues(i));
  }
  double psi_sum = 0.0;
  for (int j = 0; j < cfg.tx_antennas; ++j) {
    psi_sum += digamma(n_t - j);
  }
  const double lo = 0.5 * (logdet_cov - logdet_shifted +
                           m_t * n_c * std::log(snr / m_t) + n_c * psi_sum);

  if (cfg.training_symbols < cfg.tx_antennas + 2) {
    std::ostringstream oss;
    oss << "requires training_symbols >= tx_antennas + 2 ("
        << cfg.training_symbols << " < " << cfg.tx_antennas + 2 << ")";
    return {ok(lo), invalid(oss.str())};
  }

  const double lam_min = model.spectrum.min_positive();
  const double hi =
      m_t / (2.0 * snr * (n_t - m_t)) *
      (-inverse_trace(model) +
       m_t * m_t * n_c * n_t /
           (2.0 * snr * (n_t - m_t - 1.0) * (n_t - m_t + 1.0) * lam_min *
            lam_min));
  return {ok(lo), ok(hi)};
}

std::pair<BoundValue, BoundValue> bound_mmse(const SystemConfig& cfg,
                                             const ChannelModel& model) {
  cfg.validate();
  const std::string shared = shared_requirement_failure(cfg, model);
  if (!shared.empty()) return {invalid(shared), invalid(shared)};

  const double m_t = cfg.tx_antennas;
  const double n_c = cfg.subcarriers;
  const double n_t = cfg.training_symbols;
  const double snr = cfg.snr_downlink;

  const double alpha = snr * n_t / m_t;
  double lo = 0.0;
  for (Index i = 0; i < model.spectrum.eigenvalues.size(); ++i) {
    const double lam = model.spectrum.eigenvalues(i);
    lo += lam / (1.0 + alpha * lam);
  }

  if (cfg.training_symbols <= cfg.tx_antennas) {
    std::ostringstream oss;
    oss << "requires training_symbols > tx_antennas (" << cfg.training_symbols
        << " <= " << cfg.tx_antennas << ")";
    return {ok(lo), invalid(oss.str())};
  }
  const double hi = m_t * m_t * n_c / (snr * (n_t - m_t));
  return {ok(lo), ok(hi)};
}

std::pair<BoundValue, BoundValue> bound_distortion_delta(
    const SystemConfig& cfg, const ChannelModel& model) {
  cfg.validate();
  const auto [mmse_lo, mmse_hi] = bound_mmse(cfg, model);
  if (!mmse_lo.valid) return {invalid(mmse_lo.why_invalid), invalid(mmse_lo.why_invalid)};

  const double m_t = cfg.tx_antennas;
  const double n_c = cfg.subcarriers;
  const double d = cfg.distortion_budget;

  BoundValue lo;
  if (d <= mmse_lo.value) {
    std::ostringstream oss;
    oss << "requires d > the mmse lower bound (" << d
        << " <= " << mmse_lo.value << ")";
    lo = invalid(oss.str());
  } else {
    lo = ok(-0.5 * m_t * n_c * std::log1p(-mmse_lo.value / d));
  }

  BoundValue hi;
  if (!mmse_hi.valid) {
    hi = invalid(mmse_hi.why_invalid);
  } else {
    hi = ok(m_t * n_c / (2.0 * cfg.epsilon * d) * mmse_hi.value);
  }
  return {lo, hi};
}

BoundSet evaluate_bounds(const SystemConfig& cfg, const ChannelModel& model) {
  BoundSet set;
  std::tie(set.source_delta_lo, set.source_delta_hi) =
      bound_source_delta(cfg, model);
  std::tie(set.mmse_lo, set.mmse_hi) = bound_mmse(cfg, model);
  std::tie(set.distortion_delta_lo, set.distortion_delta_hi) =
      bound_distortion_delta(cfg, model);

  if (set.source_delta_lo.valid && set.distortion_delta_lo.valid) {
    set.overall_lo = ok(set.source_delta_lo.value + set.distortion_delta_lo.value);
  } else {
    set.overall_lo = invalid(set.source_delta_lo.valid
                                 ? set.distortion_delta_lo.why_invalid
                                 : set.source_delta_lo.why_invalid);
  }
  if (set.source_delta_hi.valid && set.distortion_delta_hi.valid) {
    set.overall_hi = ok(set.source_delta_hi.value + set.distortion_delta_hi.value);
  } else {
    set.overall_hi = invalid(set.source_delta_hi.valid
                                 ? set.distortion_delta_hi.why_invalid
                                 : set.source_delta_hi.why_invalid);
  }
  return set;
}

AsymptoticCoefficients asymptotic_coefficients(const SystemConfig& cfg,
                                               const ChannelModel& model) {
  cfg.validate();
  if (model.rank() != model.dim()) {
    raise(ErrorCode::SingularCovariance,
          "asymptotic_coefficients: covariance must be invertible");
  }
  const double m_t = cfg.tx_antennas;
  const double n_c = cfg.subcarriers;
  const double snr = cfg.snr_downlink;
  const double d = cfg.distortion_budget;

  AsymptoticCoefficients c;
  const double inv_tr = inverse_trace(model);
  c.source_hi = -m_t * inv_tr / (2.0 * snr);
  c.source_lo = c.source_hi - m_t * m_t * n_c / 4.0;
  c.mmse_slope = m_t * m_t * n_c / snr;
  c.distortion_lo = m_t * m_t * m_t * n_c * n_c / (2.0 * d * snr);
  c.distortion_hi = c.distortion_lo / cfg.epsilon;
  c.overall_lo = c.source_lo + c.distortion_lo;
  c.overall_hi = c.source_hi + c.distortion_hi;
  return c;
}

double wishart_logdet_mean(int m, int n, double sigma_logdet) {
  if (m < 1 || n < m) {
    raise(ErrorCode::PreconditionViolated,
          "wishart_logdet_mean: requires n >= m >= 1");
  }
  double psi_sum = 0.0;
  for (int j = 0; j < m; ++j) {
    psi_sum += digamma(static_cast<double>(n - j));
  }
  return sigma_logdet + psi_sum;
}

WishartInverseMoments wishart_inverse_moments(int m, int n, double p) {
  if (m < 1 || n <= m + 1) {
    raise(ErrorCode::PreconditionViolated,
          "wishart_inverse_moments: requires n > m + 1 >= 2");
  }
  if (!(p > 0.0)) {
    raise(ErrorCode::InvalidArgument,
          "wishart_inverse_moments: p must be positive");
  }
  WishartInverseMoments w;
  const double nm = static_cast<double>(n - m);
  w.inv_scale = 1.0 / (p * nm);
  w.inv_sq_scale =
      static_cast<double>(n) / (p * p * (nm - 1.0) * nm * (nm + 1.0));
  return w;
}

}  // namespace csifb
