#pragma once

#include <utility>

#include "csifb/estimation.hpp"

namespace csifb {

/// Distortion allocation across the eigenmodes of a Gaussian source:
/// a common noise level theta on the strong modes, saturation on the rest.
struct WaterfillResult {
  double water_level = 0.0;   // theta
  RealVector per_mode_noise;  // min(theta, lambda_i), descending mode order
  double rate = 0.0;          // 0.5 * sum over active modes of log(lambda/theta)
  Index active_set_size = 0;  // modes with lambda > theta
  bool budget_exceeds_variance = false;  // budget > sum(lambda): rate 0
};

/// Solve sum_i min(theta, lambda_i) = budget over the nonzero modes by an
/// exact breakpoint scan (no iterative root finding). Eigenvalues may come
/// in any order; modes at or below rank_tol * max are ignored.
/// Throws BudgetNonpositive for budget <= 0 and PreconditionViolated when
/// no positive mode exists. A budget above the total variance is legal and
/// returns rate 0 with the flag set.
WaterfillResult reverse_waterfill(const RealVector& eigenvalues, double budget,
                                  double rank_tol = kDefaultRankTol);

/// Closed-form rate (nats) for encoding the channel itself at distortion d,
/// valid while d spreads uniformly below the smallest nonzero eigenvalue
/// (d / rank <= lambda_min). Outside that range use reverse_waterfill on
/// the channel spectrum; this function then throws DistortionOutOfRange.
double direct_rate(const ChannelModel& model, double d);

/// The same expression with no range validation. This is the baseline term
/// of the rate decomposition and is well defined for every d > 0.
double direct_rate_term(const ChannelModel& model, double d);

/// Admissible budgets for the closed-form overall rate: d_min is the
/// estimation distortion, d_max adds rank * smallest nonzero eigenvalue of
/// the estimate covariance.
std::pair<double, double> distortion_range(const Spectrum& est_spectrum,
                                           double d_mmse);
std::pair<double, double> distortion_range(const MmseCovariances& est,
                                           const ChannelModel& model);
std::pair<double, double> distortion_range(const MmseResult& est,
                                           const ChannelModel& model);

/// Overall rate for one pilot realization, split into the pilot-independent
/// baseline, the gain from encoding the estimate instead of the channel,
/// and the cost of the tightened effective budget d - d_mmse.
///
/// Inside (d_min, d_max] every component follows its closed form and
/// `total` is cross-checked against the compact single-expression rate
/// (`compact_total`). Above d_max the total comes from reverse_waterfill
/// on the estimate spectrum (some modes saturate), `active_rank` drops to
/// the non-saturated mode count, and `distortion_delta` closes the sum.
struct RdfBreakdown {
  double direct_rate = 0.0;      // baseline term, independent of pilots
  double source_delta = 0.0;     // rate change from encoding the estimate
  double distortion_delta = 0.0; // rate change from the reduced budget
  double total = 0.0;            // always == sum of the three above
  double d = 0.0;
  double d_effective = 0.0;      // d - d_mmse
  Index active_rank = 0;
  bool extended_path = false;    // true when d > d_max (saturating modes)
  double compact_total = 0.0;    // cross-check value (NaN on extended path)
  bool compact_consistent = true;
};

RdfBreakdown overall_rdf(const ChannelModel& model, const Spectrum& est_spectrum,
                         double d_mmse, double d);
RdfBreakdown overall_rdf(const ChannelModel& model, const MmseCovariances& est,
                         double d);
RdfBreakdown overall_rdf(const ChannelModel& model, const MmseResult& est,
                         double d);

/// The uniform-allocation closed form evaluated as written for any budget
/// above d_mmse, spreading the effective budget evenly over every nonzero
/// estimate mode. Inside (d_min, d_max] this is the operational rate and
/// matches overall_rdf; beyond d_max it is the analytic continuation that
/// the expectation bounds apply to, while the operational rate saturates
/// weak modes (see overall_rdf). `extended_path` flags budgets beyond
/// d_max. The decomposition-vs-compact cross-check is algebraic and holds
/// on every path.
RdfBreakdown closed_form_breakdown(const ChannelModel& model,
                                   const Spectrum& est_spectrum, double d_mmse,
                                   double d);

/// Draw a reconstruction Z from the conditional law of the rate-achieving
/// backward channel S = Z + noise, evaluated mode by mode on the estimate
/// eigenbasis. Saturated modes yield Z = 0 on that mode.
Vector simulate_test_channel(const Spectrum& est_spectrum,
                             const WaterfillResult& wf,
                             const Vector& estimate, Rng& rng);
Vector simulate_test_channel(const MmseResult& est, const WaterfillResult& wf,
                             const Vector& estimate, Rng& rng);

}  // namespace csifb
