#include "csifb/rdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace csifb {

namespace {

constexpr double kPiE = 8.539734222673566;  // exp(kLogPiE)
constexpr double kCompactCheckTol = 1e-9;
// Gross disagreement between the decomposition and the compact form means
// numerical corruption rather than round-off.
constexpr double kCompactAbortTol = 1e-6;
// Slack for boundary comparisons of distortion budgets.
constexpr double kBoundarySlack = 1e-12;

}  // namespace

WaterfillResult reverse_waterfill(const RealVector& eigenvalues, double budget,
                                  double rank_tol) {
  double lam_max = 0.0;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) < 0.0) {
      raise(ErrorCode::InvalidArgument,
            "reverse_waterfill: negative eigenvalue");
    }
    lam_max = std::max(lam_max, eigenvalues(i));
  }
  std::vector<double> modes;
  modes.reserve(static_cast<std::size_t>(eigenvalues.size()));
  const double floor = rank_tol * lam_max;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) > floor) modes.push_back(eigenvalues(i));
  }
  if (modes.empty()) {
    raise(ErrorCode::PreconditionViolated,
          "reverse_waterfill: no positive eigenvalue");
  }
  if (!(budget > 0.0)) {
    raise(ErrorCode::BudgetNonpositive,
          "reverse_waterfill: distortion budget must be positive");
  }

  std::sort(modes.begin(), modes.end());  // ascending
  const Index r = static_cast<Index>(modes.size());
  const double total = pairwise_sum(modes);

  WaterfillResult wf;
  if (budget > total * (1.0 + kBoundarySlack)) {
    // Zero rate already meets the budget; saturate everything.
    wf.budget_exceeds_variance = true;
    wf.water_level = modes.back();
    wf.rate = 0.0;
    wf.active_set_size = 0;
  } else {
    // Exact piecewise-linear solve of sum_i min(theta, lambda_i) = budget:
    // with the k smallest modes saturated, theta = (budget - prefix_k)/(r-k);
    // take the first k whose theta stays at or below the next eigenvalue.
    double prefix = 0.0;
    double theta = budget / static_cast<double>(r);
    for (Index k = 0; k < r; ++k) {
      theta = (budget - prefix) / static_cast<double>(r - k);
      if (theta <= modes[static_cast<std::size_t>(k)] * (1.0 + kBoundarySlack)) {
        break;
      }
      prefix += modes[static_cast<std::size_t>(k)];
    }
    wf.water_level = theta;
    double rate = 0.0;
    Index active = 0;
    for (double lam : modes) {
      if (lam > theta) {
        rate += std::log(lam / theta);
        ++active;
      }
    }
    wf.rate = 0.5 * rate;
    wf.active_set_size = active;
  }

  // Report noise per mode in the descending order used by Spectrum.
  wf.per_mode_noise.resize(r);
  for (Index i = 0; i < r; ++i) {
    wf.per_mode_noise(i) =
        std::min(wf.water_level, modes[static_cast<std::size_t>(r - 1 - i)]);
  }
  return wf;
}

double direct_rate_term(const ChannelModel& model, double d) {
  if (!(d > 0.0)) {
    raise(ErrorCode::InvalidArgument, "direct rate: d must be positive");
  }
  const Index rank = model.rank();
  if (rank == 0) return 0.0;
  const double r = static_cast<double>(rank);
  return 0.5 * pseudo_logdet(model.spectrum) - 0.5 * r * std::log(d / r);
}

double direct_rate(const ChannelModel& model, double d) {
  if (!(d > 0.0)) {
    raise(ErrorCode::InvalidArgument, "direct rate: d must be positive");
  }
  const Index rank = model.rank();
  if (rank == 0) return 0.0;
  const double limit =
      static_cast<double>(rank) * model.spectrum.min_positive();
  if (d > limit * (1.0 + kBoundarySlack)) {
    std::ostringstream oss;
    oss << "direct rate: d = " << d
        << " exceeds the uniform-allocation range d <= rank * lambda_min = "
        << limit << "; use reverse_waterfill on the channel spectrum";
    raise(ErrorCode::DistortionOutOfRange, oss.str());
  }
  return direct_rate_term(model, d);
}

std::pair<double, double> distortion_range(const Spectrum& est_spectrum,
                                           double d_mmse) {
  const double d_min = d_mmse;
  if (est_spectrum.rank == 0) return {d_min, d_min};
  const double d_max = d_min + static_cast<double>(est_spectrum.rank) *
                                   est_spectrum.min_positive();
  return {d_min, d_max};
}

std::pair<double, double> distortion_range(const MmseCovariances& est,
                                           const ChannelModel&) {
  return distortion_range(est.est_spectrum, est.d_mmse);
}

std::pair<double, double> distortion_range(const MmseResult& est,
                                           const ChannelModel&) {
  return distortion_range(est.est_spectrum, est.d_mmse);
}

namespace {

struct BreakdownContext {
  double d_min = 0.0;
  double d_max = 0.0;
  double half_entropy_gap = 0.0;  // 0.5 * (h(S|P) - h(H))
  double pld_est = 0.0;
};

BreakdownContext breakdown_context(const ChannelModel& model,
                                   const Spectrum& est_spectrum, double d_mmse,
                                   double d, const char* who) {
  if (!(d > 0.0)) {
    raise(ErrorCode::InvalidArgument,
          std::string(who) + ": d must be positive");
  }
  BreakdownContext ctx;
  std::tie(ctx.d_min, ctx.d_max) = distortion_range(est_spectrum, d_mmse);
  if (d <= ctx.d_min) {
    std::ostringstream oss;
    oss << who << ": d = " << d
        << " is infeasible; the rate is infinite at or below d_min = "
        << ctx.d_min;
    raise(ErrorCode::DistortionBelowMmse, oss.str());
  }
  ctx.pld_est = pseudo_logdet(est_spectrum);
  ctx.half_entropy_gap =
      0.5 * (static_cast<double>(est_spectrum.rank - model.rank()) * kLogPiE +
             ctx.pld_est - pseudo_logdet(model.spectrum));
  return ctx;
}

}  // namespace

RdfBreakdown closed_form_breakdown(const ChannelModel& model,
                                   const Spectrum& est_spectrum, double d_mmse,
                                   double d) {
  const BreakdownContext ctx =
      breakdown_context(model, est_spectrum, d_mmse, d, "closed_form_breakdown");

  RdfBreakdown bd;
  bd.d = d;
  bd.d_effective = d - ctx.d_min;
  bd.direct_rate = direct_rate_term(model, d);
  bd.extended_path = d > ctx.d_max * (1.0 + kBoundarySlack);
  bd.compact_total = std::numeric_limits<double>::quiet_NaN();

  if (est_spectrum.rank == 0) {
    raise(ErrorCode::PreconditionViolated,
          "closed_form_breakdown: the estimate covariance has rank zero");
  }
  const double r_h = static_cast<double>(model.rank());
  const double r_s = static_cast<double>(est_spectrum.rank);

  bd.active_rank = est_spectrum.rank;
  bd.source_delta = ctx.half_entropy_gap + 0.5 * r_h * std::log(r_s / r_h);
  bd.distortion_delta = 0.5 * (r_h - r_s) * std::log(d * kPiE / r_s) -
                        0.5 * r_s * std::log1p(-d_mmse / d);
  bd.total = bd.direct_rate + bd.source_delta + bd.distortion_delta;

  bd.compact_total = 0.5 * ctx.pld_est - 0.5 * r_s * std::log(bd.d_effective / r_s);
  const double ref = std::max(std::abs(bd.compact_total), 1.0);
  const double diff = std::abs(bd.total - bd.compact_total);
  bd.compact_consistent = diff <= kCompactCheckTol * ref;
  if (diff > kCompactAbortTol * ref) {
    std::ostringstream oss;
    oss << "closed_form_breakdown: decomposition (" << bd.total
        << ") and compact form (" << bd.compact_total << ") disagree";
    raise(ErrorCode::NumericalFailure, oss.str());
  }
  return bd;
}

RdfBreakdown overall_rdf(const ChannelModel& model, const Spectrum& est_spectrum,
                         double d_mmse, double d) {
  const BreakdownContext ctx =
      breakdown_context(model, est_spectrum, d_mmse, d, "overall_rdf");

  if (est_spectrum.rank == 0) {
    // Deterministic estimate: nothing to encode, zero rate.
    RdfBreakdown bd;
    bd.d = d;
    bd.d_effective = d - ctx.d_min;
    bd.direct_rate = direct_rate_term(model, d);
    bd.extended_path = true;
    bd.active_rank = 0;
    bd.total = 0.0;
    bd.source_delta = -bd.direct_rate;
    bd.distortion_delta = 0.0;
    bd.compact_total = std::numeric_limits<double>::quiet_NaN();
    return bd;
  }

  if (d <= ctx.d_max * (1.0 + kBoundarySlack)) {
    RdfBreakdown bd = closed_form_breakdown(model, est_spectrum, d_mmse, d);
    bd.extended_path = false;
    return bd;
  }

  // Budget beyond the uniform range: weak estimate modes saturate and the
  // rate follows the general allocation on the estimate spectrum.
  RdfBreakdown bd;
  bd.d = d;
  bd.d_effective = d - ctx.d_min;
  bd.direct_rate = direct_rate_term(model, d);
  bd.extended_path = true;
  bd.compact_total = std::numeric_limits<double>::quiet_NaN();

  WaterfillResult wf =
      reverse_waterfill(est_spectrum.eigenvalues.head(est_spectrum.rank),
                        bd.d_effective, est_spectrum.rank_tol);
  bd.total = wf.rate;
  bd.active_rank = wf.active_set_size;
  if (wf.active_set_size == 0) {
    bd.source_delta = -bd.direct_rate;
    bd.distortion_delta = 0.0;
  } else {
    const double r_h = static_cast<double>(model.rank());
    const double r_active = static_cast<double>(wf.active_set_size);
    bd.source_delta =
        ctx.half_entropy_gap + 0.5 * r_h * std::log(r_active / r_h);
    bd.distortion_delta = bd.total - bd.direct_rate - bd.source_delta;
  }
  return bd;
}

RdfBreakdown overall_rdf(const ChannelModel& model, const MmseCovariances& est,
                         double d) {
  return overall_rdf(model, est.est_spectrum, est.d_mmse, d);
}

RdfBreakdown overall_rdf(const ChannelModel& model, const MmseResult& est,
                         double d) {
  return overall_rdf(model, est.est_spectrum, est.d_mmse, d);
}

Vector simulate_test_channel(const Spectrum& est_spectrum,
                             const WaterfillResult& wf,
                             const Vector& estimate, Rng& rng) {
  if (wf.per_mode_noise.size() != est_spectrum.rank) {
    std::ostringstream oss;
    oss << "simulate_test_channel: allocation covers " << wf.per_mode_noise.size()
        << " modes, estimate spectrum has rank " << est_spectrum.rank;
    raise(ErrorCode::RankMismatch, oss.str());
  }
  if (estimate.size() != est_spectrum.eigenvectors.rows()) {
    raise(ErrorCode::DimensionMismatch,
          "simulate_test_channel: estimate length mismatch");
  }

  // Conditional law of Z given S, mode by mode: on eigenvalue lambda with
  // noise n, Z = ((lambda - n)/lambda) s + CN(0, (lambda - n) n / lambda).
  const Matrix& basis = est_spectrum.eigenvectors;
  Vector modes = basis.adjoint() * estimate;
  Vector z_modes = Vector::Zero(estimate.size());
  for (Index i = 0; i < est_spectrum.rank; ++i) {
    const double lam = est_spectrum.eigenvalues(i);
    const double noise = std::min(wf.per_mode_noise(i), lam);
    const double shrink = (lam - noise) / lam;
    Complex z = shrink * modes(i);
    const double cond_var = shrink * noise;
    if (cond_var > 0.0) z += rng.complex_gaussian(cond_var);
    z_modes(i) = z;
  }
  return basis * z_modes;
}

Vector simulate_test_channel(const MmseResult& est, const WaterfillResult& wf,
                             const Vector& estimate, Rng& rng) {
  return simulate_test_channel(est.est_spectrum, wf, estimate, rng);
}

}  // namespace csifb
