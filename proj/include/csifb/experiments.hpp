#pragma once

#include <cstdint>
#include <vector>

#include "csifb/bounds.hpp"
#include "csifb/rdf.hpp"

namespace csifb {

/// Monte Carlo estimate of one expectation over pilot draws.
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;  // samples actually accumulated
  std::uint64_t seed = 0;
  double epsilon_violation_fraction = 0.0;  // draws with d_mmse > (1-eps) d
  std::int64_t skipped = 0;                 // draws with d <= d_mmse
};

/// Per-trial outcome of the rate pipeline for one pilot draw. Trial i of a
/// run with root seed s uses the derived stream Rng(s).derive(i), so the
/// result is independent of evaluation order.
///
/// The rate quantities are the closed-form expressions (uniform allocation
/// over all nonzero estimate modes): those are what the deterministic
/// expectation bounds refer to. Draws whose budget lands beyond the
/// uniform range are flagged `extended` but still evaluated in closed
/// form; only infeasible draws (d <= d_mmse) are skipped.
struct TrialOutcome {
  double source_delta = 0.0;
  double distortion_delta = 0.0;
  double total = 0.0;
  double d_mmse = 0.0;
  bool skipped = false;            // d <= d_mmse for this draw
  bool extended = false;           // d beyond the uniform-allocation range
  bool epsilon_violated = false;   // d_mmse > (1 - epsilon) * d
  bool numeric_warning = false;    // distortion cross-check disagreed
};

TrialOutcome mc_trial(const SystemConfig& cfg, const ChannelModel& model,
                      std::uint64_t root_seed, std::int64_t trial_index);

/// Aggregated Monte Carlo run; `gap` tracks source_delta + distortion_delta
/// per draw (the overall rate above the pilot-independent baseline).
struct McResults {
  McEstimate source_delta;
  McEstimate distortion_delta;
  McEstimate mmse;
  McEstimate total;
  McEstimate gap;
  double direct_rate = 0.0;  // baseline term at cfg.distortion_budget
  std::int64_t skipped = 0;
  double epsilon_violation_fraction = 0.0;
  double extended_fraction = 0.0;  // draws beyond the uniform range
  std::int64_t numeric_warnings = 0;
  std::int64_t trials_requested = 0;
  std::uint64_t seed = 0;
};

/// Run `trials` independent pilot draws (>= 100). A numerical failure in a
/// trial aborts with the trial index and seed in the message. Aggregation
/// uses fixed-order pairwise summation, so reruns are bit-identical.
McResults mc_run(const SystemConfig& cfg, const ChannelModel& model,
                 std::int64_t trials, std::uint64_t seed);

/// One grid point of a training-length sweep.
struct SweepPoint {
  int training_symbols = 0;
  McResults mc;
  BoundSet bounds;
  bool sandwich_ok = true;  // every valid bound contains its MC mean +- 3 sigma
};

/// Training-length sweep with decay fits over the top half of the grid.
struct SweepResult {
  std::vector<SweepPoint> points;
  double direct_rate = 0.0;
  // least-squares slope of log(gap mean) vs log(training_symbols)
  double gap_loglog_slope = 0.0;
  bool gap_loglog_slope_valid = false;
  // through-origin fits of mean vs 1/training_symbols, one per decaying
  // quantity
  double gap_coefficient = 0.0;
  double gap_fit_residual = 0.0;  // rms relative residual
  double mmse_coefficient = 0.0;
  double mmse_fit_residual = 0.0;
  double source_delta_coefficient = 0.0;
  double source_delta_fit_residual = 0.0;
  double distortion_delta_coefficient = 0.0;
  double distortion_delta_fit_residual = 0.0;
  bool all_sandwich_ok = true;
  std::size_t fit_window_begin = 0;  // first grid index used by the fits
};

/// Grid must be strictly increasing with every entry >= tx_antennas.
SweepResult sweep_training_symbols(const SystemConfig& cfg,
                                   const ChannelModel& model,
                                   const std::vector<int>& grid,
                                   std::int64_t trials, std::uint64_t seed);

/// End-to-end distortion check: per draw, estimate the channel from a
/// simulated training round, pass the estimate through the rate-achieving
/// backward channel, and accumulate the squared reconstruction error. The
/// mean must land on the configured budget. Draws whose budget is below
/// the estimation distortion are skipped and counted; more than 20%
/// skipped aborts with TooManySkipped.
McEstimate e2e_distortion_check(const SystemConfig& cfg,
                                const ChannelModel& model,
                                std::int64_t trials, std::uint64_t seed);

/// Monte Carlo check of the closed-form Wishart moments: E[log det],
/// E[W^{-1}] and E[W^{-2}] for W = G G^H, G being m x n i.i.d. CN(0, p).
struct WishartCheck {
  double logdet_mean = 0.0;
  double logdet_std_error = 0.0;
  double logdet_expected = 0.0;
  double inv_diag_worst_rel_err = 0.0;    // max over diagonal entries
  double inv_diag_expected = 0.0;
  double inv_sq_diag_worst_rel_err = 0.0;
  double inv_sq_diag_expected = 0.0;
  std::int64_t draws = 0;
  bool logdet_ok = false;   // within 3 standard errors
  bool inv_ok = false;      // every diagonal entry within inv_tol
  bool inv_sq_ok = false;   // every diagonal entry within inv_sq_tol
};

WishartCheck wishart_mc_check(int m, int n, double p, std::int64_t draws,
                              std::uint64_t seed, double inv_tol = 0.02,
                              double inv_sq_tol = 0.03);

}  // namespace csifb
