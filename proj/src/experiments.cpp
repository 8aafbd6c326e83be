#include "csifb/experiments.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace csifb {

namespace {

McEstimate make_estimate(std::span<const double> values, std::uint64_t seed,
                         std::int64_t skipped, double eps_fraction) {
  const SampleStats stats = summarize(values);
  McEstimate est;
  est.mean = stats.mean;
  est.std_error = stats.std_error;
  est.trials = stats.count;
  est.seed = seed;
  est.skipped = skipped;
  est.epsilon_violation_fraction = eps_fraction;
  return est;
}

/// Through-origin least squares of y against 1/x, plus an rms relative
/// residual; used for the 1/n decay fits.
void fit_inverse_coefficient(const std::vector<double>& n_values,
                             const std::vector<double>& y_values,
                             double* coefficient, double* residual) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const double x = 1.0 / n_values[i];
    num += y_values[i] * x;
    den += x * x;
  }
  *coefficient = den > 0.0 ? num / den : 0.0;
  double err_sq = 0.0;
  double ref_sq = 0.0;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const double fitted = *coefficient / n_values[i];
    err_sq += (y_values[i] - fitted) * (y_values[i] - fitted);
    ref_sq += y_values[i] * y_values[i];
  }
  *residual = ref_sq > 0.0 ? std::sqrt(err_sq / ref_sq) : 0.0;
}

bool within(double mean, double sigma, const BoundValue& lo,
            const BoundValue& hi) {
  if (lo.valid && mean < lo.value - 3.0 * sigma) return false;
  if (hi.valid && mean > hi.value + 3.0 * sigma) return false;
  return true;
}

}  // namespace

TrialOutcome mc_trial(const SystemConfig& cfg, const ChannelModel& model,
                      std::uint64_t root_seed, std::int64_t trial_index) {
  Rng rng = Rng(root_seed).derive(static_cast<std::uint64_t>(trial_index));
  PilotBlocks blocks = sample_pilot_blocks(cfg, default_pilot_set(cfg), rng);
  Matrix gram =
      model.sqrt_cov * blocks.self_gram(cfg.subcarriers) * model.sqrt_cov;
  gram = 0.5 * (gram + Matrix(gram.adjoint()));
  const MmseCovariances est = mmse_covariances(model, gram);

  TrialOutcome out;
  out.d_mmse = est.d_mmse;
  out.numeric_warning = !est.consistent;
  out.epsilon_violated =
      est.d_mmse > (1.0 - cfg.epsilon) * cfg.distortion_budget;
  if (cfg.distortion_budget <= est.d_mmse || est.estimate_rank == 0) {
    out.skipped = true;
    return out;
  }
  const RdfBreakdown bd = closed_form_breakdown(
      model, est.est_spectrum, est.d_mmse, cfg.distortion_budget);
  out.source_delta = bd.source_delta;
  out.distortion_delta = bd.distortion_delta;
  out.total = bd.total;
  out.extended = bd.extended_path;
  out.numeric_warning = out.numeric_warning || !bd.compact_consistent;
  return out;
}

McResults mc_run(const SystemConfig& cfg, const ChannelModel& model,
                 std::int64_t trials, std::uint64_t seed) {
  cfg.validate();
  if (trials < 100) {
    raise(ErrorCode::PreconditionViolated, "mc_run: needs at least 100 trials");
  }
  if (model.dim() != cfg.dim()) {
    raise(ErrorCode::DimensionMismatch,
          "mc_run: model dimension does not match the configuration");
  }

  std::vector<double> source, dist, total, gap, mmse_vals;
  source.reserve(trials);
  dist.reserve(trials);
  total.reserve(trials);
  gap.reserve(trials);
  mmse_vals.reserve(trials);

  McResults results;
  results.seed = seed;
  results.trials_requested = trials;
  results.direct_rate = direct_rate_term(model, cfg.distortion_budget);

  std::int64_t eps_violations = 0;
  std::int64_t extended = 0;
  for (std::int64_t i = 0; i < trials; ++i) {
    TrialOutcome outcome;
    try {
      outcome = mc_trial(cfg, model, seed, i);
    } catch (const Error& e) {
      std::ostringstream oss;
      oss << "mc_run: trial " << i << " (root seed " << seed
          << ") failed: " << e.what();
      raise(e.code(), oss.str());
    }
    if (outcome.epsilon_violated) ++eps_violations;
    if (outcome.numeric_warning) ++results.numeric_warnings;
    if (outcome.extended) ++extended;
    if (outcome.skipped) {
      ++results.skipped;
      continue;
    }
    source.push_back(outcome.source_delta);
    dist.push_back(outcome.distortion_delta);
    total.push_back(outcome.total);
    gap.push_back(outcome.source_delta + outcome.distortion_delta);
    mmse_vals.push_back(outcome.d_mmse);
  }

  results.epsilon_violation_fraction =
      static_cast<double>(eps_violations) / static_cast<double>(trials);
  results.extended_fraction =
      static_cast<double>(extended) / static_cast<double>(trials);
  results.source_delta = make_estimate(source, seed, results.skipped,
                                       results.epsilon_violation_fraction);
  results.distortion_delta = make_estimate(dist, seed, results.skipped,
                                           results.epsilon_violation_fraction);
  results.total = make_estimate(total, seed, results.skipped,
                                results.epsilon_violation_fraction);
  results.gap = make_estimate(gap, seed, results.skipped,
                              results.epsilon_violation_fraction);
  results.mmse = make_estimate(mmse_vals, seed, results.skipped,
                               results.epsilon_violation_fraction);
  return results;
}

SweepResult sweep_training_symbols(const SystemConfig& cfg,
                                   const ChannelModel& model,
                                   const std::vector<int>& grid,
                                   std::int64_t trials, std::uint64_t seed) {
  if (grid.empty()) {
    raise(ErrorCode::InvalidArgument, "sweep: empty training grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < cfg.tx_antennas) {
      std::ostringstream oss;
      oss << "sweep: grid point " << grid[i] << " below tx_antennas = "
          << cfg.tx_antennas;
      raise(ErrorCode::PreconditionViolated, oss.str());
    }
    if (i > 0 && grid[i] <= grid[i - 1]) {
      raise(ErrorCode::InvalidArgument,
            "sweep: grid must be strictly increasing");
    }
  }

  SweepResult sweep;
  sweep.direct_rate = direct_rate_term(model, cfg.distortion_budget);
  sweep.points.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    SystemConfig point_cfg = cfg;
    point_cfg.training_symbols = grid[k];
    const std::uint64_t point_seed = Rng::derive_seed(seed, k);

    SweepPoint point;
    point.training_symbols = grid[k];
    point.mc = mc_run(point_cfg, model, trials, point_seed);
    point.bounds = evaluate_bounds(point_cfg, model);

    point.sandwich_ok =
        within(point.mc.source_delta.mean, point.mc.source_delta.std_error,
               point.bounds.source_delta_lo, point.bounds.source_delta_hi) &&
        within(point.mc.mmse.mean, point.mc.mmse.std_error, point.bounds.mmse_lo,
               point.bounds.mmse_hi) &&
        within(point.mc.distortion_delta.mean,
               point.mc.distortion_delta.std_error,
               point.bounds.distortion_delta_lo,
               point.bounds.distortion_delta_hi) &&
        within(point.mc.gap.mean, point.mc.gap.std_error, point.bounds.overall_lo,
               point.bounds.overall_hi);
    sweep.all_sandwich_ok = sweep.all_sandwich_ok && point.sandwich_ok;
    sweep.points.push_back(std::move(point));
  }

  // Decay fits over the largest training lengths, where the expansion in
  // 1/training_symbols is trustworthy.
  sweep.fit_window_begin = sweep.points.size() / 2;
  std::vector<double> n_values, gap_means, mmse_means, source_means, dist_means;
  bool gaps_positive = true;
  for (std::size_t k = sweep.fit_window_begin; k < sweep.points.size(); ++k) {
    n_values.push_back(static_cast<double>(sweep.points[k].training_symbols));
    gap_means.push_back(sweep.points[k].mc.gap.mean);
    mmse_means.push_back(sweep.points[k].mc.mmse.mean);
    source_means.push_back(sweep.points[k].mc.source_delta.mean);
    dist_means.push_back(sweep.points[k].mc.distortion_delta.mean);
    gaps_positive = gaps_positive && sweep.points[k].mc.gap.mean > 0.0;
  }

  if (n_values.size() >= 2) {
    fit_inverse_coefficient(n_values, gap_means, &sweep.gap_coefficient,
                            &sweep.gap_fit_residual);
    fit_inverse_coefficient(n_values, mmse_means, &sweep.mmse_coefficient,
                            &sweep.mmse_fit_residual);
    fit_inverse_coefficient(n_values, source_means,
                            &sweep.source_delta_coefficient,
                            &sweep.source_delta_fit_residual);
    fit_inverse_coefficient(n_values, dist_means,
                            &sweep.distortion_delta_coefficient,
                            &sweep.distortion_delta_fit_residual);
    if (gaps_positive) {
      double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
      const double count = static_cast<double>(n_values.size());
      for (std::size_t i = 0; i < n_values.size(); ++i) {
        const double x = std::log(n_values[i]);
        const double y = std::log(gap_means[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double denom = count * sxx - sx * sx;
      if (denom > 0.0) {
        sweep.gap_loglog_slope = (count * sxy - sx * sy) / denom;
        sweep.gap_loglog_slope_valid = true;
      }
    }
  }
  return sweep;
}

McEstimate e2e_distortion_check(const SystemConfig& cfg,
                                const ChannelModel& model,
                                std::int64_t trials, std::uint64_t seed) {
  cfg.validate();
  if (trials < 100) {
    raise(ErrorCode::PreconditionViolated,
          "e2e_distortion_check: needs at least 100 trials");
  }
  const Rng root(seed);
  std::vector<double> errors;
  errors.reserve(trials);
  std::int64_t skipped = 0;

  for (std::int64_t i = 0; i < trials; ++i) {
    Rng rng = root.derive(static_cast<std::uint64_t>(i));
    const PilotMatrix pilot = sample_pilot(cfg, rng);
    const EffectiveMatrix eff = effective_matrix(model, pilot);
    const MmseResult est = mmse(model, eff, pilot);
    const TrainingSample round = sample_training(model, pilot, rng);
    const Vector s = estimate(est, round.observation);

    if (cfg.distortion_budget <= est.d_mmse || est.estimate_rank == 0) {
      ++skipped;
      continue;
    }
    const WaterfillResult wf = reverse_waterfill(
        est.est_spectrum.eigenvalues.head(est.est_spectrum.rank),
        cfg.distortion_budget - est.d_mmse, est.est_spectrum.rank_tol);
    const Vector z = simulate_test_channel(est, wf, s, rng);
    errors.push_back((round.channel - z).squaredNorm());
  }

  if (skipped * 5 > trials) {
    std::ostringstream oss;
    oss << "e2e_distortion_check: " << skipped << " of " << trials
        << " draws had an infeasible budget; the configuration is off";
    raise(ErrorCode::TooManySkipped, oss.str());
  }
  McEstimate est = make_estimate(errors, seed, skipped, 0.0);
  return est;
}

WishartCheck wishart_mc_check(int m, int n, double p, std::int64_t draws,
                              std::uint64_t seed, double inv_tol,
                              double inv_sq_tol) {
  if (draws < 2) {
    raise(ErrorCode::InvalidArgument, "wishart_mc_check: needs >= 2 draws");
  }
  const WishartInverseMoments moments = wishart_inverse_moments(m, n, p);
  const double logdet_expected =
      wishart_logdet_mean(m, n, m * std::log(p));

  std::vector<double> logdets;
  logdets.reserve(draws);
  std::vector<std::vector<double>> inv_diag(m);
  std::vector<std::vector<double>> inv_sq_diag(m);
  for (int i = 0; i < m; ++i) {
    inv_diag[i].reserve(draws);
    inv_sq_diag[i].reserve(draws);
  }

  Rng rng(seed);
  const Matrix identity = Matrix::Identity(m, m);
  for (std::int64_t k = 0; k < draws; ++k) {
    Matrix g(m, n);
    for (int col = 0; col < n; ++col) {
      for (int row = 0; row < m; ++row) g(row, col) = rng.complex_gaussian(p);
    }
    Matrix w = g * g.adjoint();
    w = 0.5 * (w + Matrix(w.adjoint()));
    Eigen::LLT<Matrix> llt(w);
    if (llt.info() != Eigen::Success) {
      raise(ErrorCode::NumericalFailure,
            "wishart_mc_check: singular Wishart draw");
    }
    double logdet = 0.0;
    const Matrix l = llt.matrixL();
    for (int i = 0; i < m; ++i) logdet += 2.0 * std::log(l(i, i).real());
    logdets.push_back(logdet);

    const Matrix w_inv = llt.solve(identity);
    const Matrix w_inv_sq = w_inv * w_inv;
    for (int i = 0; i < m; ++i) {
      inv_diag[i].push_back(w_inv(i, i).real());
      inv_sq_diag[i].push_back(w_inv_sq(i, i).real());
    }
  }

  WishartCheck check;
  check.draws = draws;
  const SampleStats logdet_stats = summarize(logdets);
  check.logdet_mean = logdet_stats.mean;
  check.logdet_std_error = logdet_stats.std_error;
  check.logdet_expected = logdet_expected;
  check.logdet_ok = std::abs(check.logdet_mean - logdet_expected) <=
                    3.0 * check.logdet_std_error;

  check.inv_diag_expected = moments.inv_scale;
  check.inv_sq_diag_expected = moments.inv_sq_scale;
  for (int i = 0; i < m; ++i) {
    const double inv_mean =
        pairwise_sum(inv_diag[i]) / static_cast<double>(draws);
    const double inv_sq_mean =
        pairwise_sum(inv_sq_diag[i]) / static_cast<double>(draws);
    check.inv_diag_worst_rel_err =
        std::max(check.inv_diag_worst_rel_err,
                 std::abs(inv_mean / moments.inv_scale - 1.0));
    check.inv_sq_diag_worst_rel_err =
        std::max(check.inv_sq_diag_worst_rel_err,
                 std::abs(inv_sq_mean / moments.inv_sq_scale - 1.0));
  }
  check.inv_ok = check.inv_diag_worst_rel_err <= inv_tol;
  check.inv_sq_ok = check.inv_sq_diag_worst_rel_err <= inv_sq_tol;
  return check;
}

}  // namespace csifb
