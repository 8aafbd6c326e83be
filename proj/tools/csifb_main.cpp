// csifb command-line front end. Talks to the shared library exclusively
// through the C API in csifb.h.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "csifb.h"

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Exit codes: 0 success, 2 config error, 3 assertion failure, 4 numerical.
constexpr int kExitConfig = 2;
constexpr int kExitAssertion = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(csifb_status status) {
  switch (status) {
    case CSIFB_OK:
      return 0;
    case CSIFB_ERR_ARG:
    case CSIFB_ERR_CONFIG:
    case CSIFB_ERR_PRECONDITION:
    case CSIFB_ERR_INFEASIBLE:
    case CSIFB_ERR_IO:
      return kExitConfig;
    case CSIFB_ERR_NUMERIC:
      return kExitNumeric;
  }
  return kExitNumeric;
}

int report_failure(csifb_status status) {
  std::fprintf(stderr, "error (%s): %s\n", csifb_status_name(status),
               csifb_last_error());
  return exit_code_for(status);
}

struct ConfigHandle {
  csifb_config* ptr = nullptr;
  ~ConfigHandle() { csifb_config_free(ptr); }
};

struct ModelHandle {
  csifb_model* ptr = nullptr;
  ~ModelHandle() { csifb_model_free(ptr); }
};

struct SweepHandle {
  csifb_sweep* ptr = nullptr;
  ~SweepHandle() { csifb_sweep_free(ptr); }
};

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::int64_t trials = 0;
  bool trials_set = false;
  std::string out_dir;
  bool out_set = false;
  bool bits = false;
};

void add_common(CLI::App* cmd, CommonOptions* opts, bool needs_config) {
  auto* cfg = cmd->add_option("--config", opts->config_path,
                              "experiment config file (key = value lines)");
  if (needs_config) cfg->required();
  cmd->add_option("--seed", opts->seed, "override the config seed")
      ->each([opts](const std::string&) { opts->seed_set = true; });
  cmd->add_option("--trials", opts->trials, "override the trial count")
      ->each([opts](const std::string&) { opts->trials_set = true; });
  cmd->add_option("--out", opts->out_dir, "override the output directory")
      ->each([opts](const std::string&) { opts->out_set = true; });
  cmd->add_flag("--bits", opts->bits, "report rates in bits instead of nats");
}

int load_config_and_model(const CommonOptions& opts, ConfigHandle* cfg,
                          ModelHandle* model) {
  csifb_status status = csifb_config_load(opts.config_path.c_str(), &cfg->ptr);
  if (status != CSIFB_OK) return report_failure(status);
  if (opts.seed_set) csifb_config_set_seed(cfg->ptr, opts.seed);
  if (opts.trials_set) {
    status = csifb_config_set_trials(cfg->ptr, opts.trials);
    if (status != CSIFB_OK) return report_failure(status);
  }
  if (opts.out_set) csifb_config_set_out_dir(cfg->ptr, opts.out_dir.c_str());
  if (opts.bits) csifb_config_set_rate_unit_bits(cfg->ptr, 1);
  status = csifb_model_create(cfg->ptr, &model->ptr);
  if (status != CSIFB_OK) return report_failure(status);
  return -1;  // keep going
}

double unit_scale(const ConfigHandle& cfg) {
  return csifb_config_rate_in_bits(cfg.ptr) ? 1.0 / kLn2 : 1.0;
}

const char* unit_name(const ConfigHandle& cfg) {
  return csifb_config_rate_in_bits(cfg.ptr) ? "bits" : "nats";
}

void print_header(const ConfigHandle& cfg, const ModelHandle& model) {
  char line[512];
  csifb_config_describe(cfg.ptr, line, sizeof(line));
  std::printf("configuration: %s\n", line);
  std::printf("covariance: N=%" PRId64 " rank=%" PRId64 " trace=%.6g\n",
              csifb_model_dim(model.ptr), csifb_model_rank(model.ptr),
              csifb_model_trace(model.ptr));
}

int run_rdf(const CommonOptions& opts, std::uint64_t pilot_seed,
            bool pilot_seed_set, bool csv, const std::string& dump_cov) {
  ConfigHandle cfg;
  ModelHandle model;
  const int early = load_config_and_model(opts, &cfg, &model);
  if (early >= 0) return early;
  if (!pilot_seed_set) pilot_seed = csifb_config_seed(cfg.ptr);
  if (!dump_cov.empty()) {
    const csifb_status st = csifb_model_save_text(model.ptr, dump_cov.c_str());
    if (st != CSIFB_OK) return report_failure(st);
    std::printf("wrote covariance to %s\n", dump_cov.c_str());
  }

  csifb_rdf_report report;
  const csifb_status status =
      csifb_rdf_eval(cfg.ptr, model.ptr, pilot_seed, &report);
  if (status == CSIFB_ERR_INFEASIBLE) {
    std::fprintf(stderr,
                 "error: distortion %.17g is infeasible for this pilot draw; "
                 "it must exceed d_min = %.17g (d_max = %.17g)\n",
                 csifb_config_distortion(cfg.ptr), report.d_min, report.d_max);
    return kExitConfig;
  }
  if (status != CSIFB_OK) return report_failure(status);

  const double scale = unit_scale(cfg);
  const char* unit = unit_name(cfg);
  print_header(cfg, model);
  std::printf("pilot seed: %" PRIu64 "\n", pilot_seed);
  std::printf("distortion range for this draw: d_min=%.10g d_max=%.10g\n",
              report.d_min, report.d_max);
  std::printf("estimation distortion d_mmse=%.10g\n", report.d_mmse);
  std::printf("entropies (%s): h_channel=%.10g h_training=%.10g "
              "h_training_noiseless=%.10g h_estimate=%.10g\n",
              unit, report.h_channel * scale, report.h_training * scale,
              report.h_training_noiseless * scale, report.h_estimate * scale);
  std::printf("ranks: channel=%" PRId64 " training=%" PRId64
              " training_noiseless=%" PRId64 " estimate=%" PRId64 "\n",
              report.rank_channel, report.rank_training,
              report.rank_training_noiseless, report.rank_estimate);
  std::printf("rate breakdown (%s): direct=%.10g source_delta=%.10g "
              "distortion_delta=%.10g total=%.10g\n",
              unit, report.direct_rate * scale, report.source_delta * scale,
              report.distortion_delta * scale, report.total_rate * scale);
  std::printf("path: %s, active rank %" PRId64 "\n",
              report.extended_path ? "extended (saturating modes)" : "uniform",
              report.active_rank);
  if (!report.distortion_check_ok) {
    std::fprintf(stderr, "warning: the two distortion/rate routes disagreed "
                         "beyond 1e-9 relative for this draw\n");
  }
  if (csv) {
    std::printf(
        "csv:pilot_seed,direct_rate,source_delta,distortion_delta,total_rate,"
        "d,d_min,d_max,active_rank,extended\n");
    std::printf("csv:%" PRIu64 ",%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%"
                PRId64 ",%d\n",
                pilot_seed, report.direct_rate * scale,
                report.source_delta * scale, report.distortion_delta * scale,
                report.total_rate * scale, report.distortion_budget,
                report.d_min, report.d_max, report.active_rank,
                report.extended_path);
  }
  return 0;
}

void print_bound(const char* name, const csifb_bound& lo,
                 const csifb_bound& hi, double scale) {
  std::printf("  %-18s ", name);
  if (lo.valid) {
    std::printf("lo=%-14.6g ", lo.value * scale);
  } else {
    std::printf("lo=invalid       ");
  }
  if (hi.valid) {
    std::printf("hi=%.6g\n", hi.value * scale);
  } else {
    std::printf("hi=invalid\n");
  }
  if (!lo.valid) std::printf("      lo: %s\n", lo.why_invalid);
  if (!hi.valid && (lo.valid || std::string(lo.why_invalid) !=
                                    std::string(hi.why_invalid))) {
    std::printf("      hi: %s\n", hi.why_invalid);
  }
}

int run_bounds(const CommonOptions& opts) {
  ConfigHandle cfg;
  ModelHandle model;
  const int early = load_config_and_model(opts, &cfg, &model);
  if (early >= 0) return early;

  csifb_bounds_report report;
  const csifb_status status = csifb_bounds_eval(cfg.ptr, model.ptr, &report);
  if (status != CSIFB_OK) return report_failure(status);

  const double scale = unit_scale(cfg);
  print_header(cfg, model);
  std::printf("direct rate at d: %.10g %s\n", report.direct_rate * scale,
              unit_name(cfg));
  std::printf("bounds on the expected per-pilot quantities (%s; mmse in "
              "energy units):\n",
              unit_name(cfg));
  print_bound("source_delta", report.source_delta_lo, report.source_delta_hi,
              scale);
  print_bound("mmse", report.mmse_lo, report.mmse_hi, 1.0);
  print_bound("distortion_delta", report.distortion_delta_lo,
              report.distortion_delta_hi, scale);
  print_bound("overall_gap", report.overall_lo, report.overall_hi, scale);
  if (report.coefficients_valid) {
    std::printf("asymptotic 1/n coefficients:\n");
    std::printf("  source      [%.6g, %.6g]\n", report.coeff_source_lo * scale,
                report.coeff_source_hi * scale);
    std::printf("  mmse slope  %.6g\n", report.coeff_mmse_slope);
    std::printf("  distortion  [%.6g, %.6g]\n",
                report.coeff_distortion_lo * scale,
                report.coeff_distortion_hi * scale);
    std::printf("  overall     [%.6g, %.6g]\n", report.coeff_overall_lo * scale,
                report.coeff_overall_hi * scale);
  } else {
    std::printf("asymptotic coefficients unavailable: %s\n",
                report.coefficients_why_invalid);
  }
  return 0;
}

int run_figure2(const CommonOptions& opts) {
  ConfigHandle cfg;
  ModelHandle model;
  const int early = load_config_and_model(opts, &cfg, &model);
  if (early >= 0) return early;

  SweepHandle sweep;
  const csifb_status status = csifb_figure2_run(cfg.ptr, model.ptr, &sweep.ptr);
  if (status != CSIFB_OK) return report_failure(status);

  print_header(cfg, model);
  const double scale = unit_scale(cfg);
  csifb_sweep_summary summary;
  csifb_sweep_summary_get(sweep.ptr, &summary);
  std::printf("gap columns in %s; sweep.csv is always nats\n", unit_name(cfg));
  std::printf("%-8s %-14s %-14s %-14s %-14s %-9s\n", "n_train", "gap_mean",
              "gap_stderr", "bound_lo", "bound_hi", "sandwich");
  for (int64_t i = 0; i < csifb_sweep_point_count(sweep.ptr); ++i) {
    csifb_sweep_point point;
    csifb_sweep_point_get(sweep.ptr, i, &point);
    char lo[32] = "invalid";
    char hi[32] = "invalid";
    if (point.bounds.overall_lo.valid) {
      std::snprintf(lo, sizeof(lo), "%.6g", point.bounds.overall_lo.value * scale);
    }
    if (point.bounds.overall_hi.valid) {
      std::snprintf(hi, sizeof(hi), "%.6g", point.bounds.overall_hi.value * scale);
    }
    std::printf("%-8" PRId64 " %-14.6g %-14.6g %-14s %-14s %-9s\n",
                point.training_symbols, point.gap_mean * scale,
                point.gap_stderr * scale, lo, hi,
                point.sandwich_ok ? "ok" : "FAIL");
  }
  int64_t warnings = 0;
  for (int64_t i = 0; i < csifb_sweep_point_count(sweep.ptr); ++i) {
    csifb_sweep_point point;
    csifb_sweep_point_get(sweep.ptr, i, &point);
    warnings += point.numeric_warnings;
  }
  if (warnings > 0) {
    std::fprintf(stderr, "warning: %" PRId64 " trials tripped the distortion "
                         "cross-check\n", warnings);
  }
  std::printf("direct rate: %.10g %s\n", summary.direct_rate * scale,
              unit_name(cfg));
  if (summary.gap_loglog_slope_valid) {
    std::printf("gap log-log slope (top half of grid): %.4f\n",
                summary.gap_loglog_slope);
  }
  std::printf("gap 1/n coefficient: %.6g (residual %.2g)\n",
              summary.gap_coefficient * scale, summary.gap_fit_residual);
  std::printf("mmse 1/n coefficient: %.6g (residual %.2g)\n",
              summary.mmse_coefficient, summary.mmse_fit_residual);
  std::printf("source / budget-cost 1/n coefficients: %.6g / %.6g\n",
              summary.source_delta_coefficient * scale,
              summary.distortion_delta_coefficient * scale);
  std::printf("wrote %s and %s\n", summary.csv_path, summary.svg_path);
  if (!summary.all_sandwich_ok) {
    std::fprintf(stderr,
                 "assertion failure: a Monte Carlo mean escaped its bound "
                 "interval (see per-point table)\n");
    return kExitAssertion;
  }
  std::printf("all sandwich checks passed\n");
  return 0;
}

int run_wishart(std::int64_t m, std::int64_t n, double power,
                std::int64_t draws, std::uint64_t seed, double inv_tol,
                double inv_sq_tol) {
  csifb_wishart_report report;
  const csifb_status status = csifb_wishart_check(m, n, power, draws, seed,
                                                  inv_tol, inv_sq_tol, &report);
  if (status != CSIFB_OK) return report_failure(status);
  std::printf("complex Wishart moment check: m=%" PRId64 " n=%" PRId64
              " power=%.6g draws=%" PRId64 " seed=%" PRIu64 "\n",
              m, n, power, draws, seed);
  std::printf("  E[log det]: mc=%.8g expected=%.8g stderr=%.3g -> %s\n",
              report.logdet_mean, report.logdet_expected, report.logdet_stderr,
              report.logdet_ok ? "ok" : "FAIL");
  std::printf("  E[inverse] diag: expected=%.8g worst rel err=%.3g (tol %.3g) "
              "-> %s\n",
              report.inv_diag_expected, report.inv_diag_worst_rel_err, inv_tol,
              report.inv_ok ? "ok" : "FAIL");
  std::printf("  E[inverse^2] diag: expected=%.8g worst rel err=%.3g (tol "
              "%.3g) -> %s\n",
              report.inv_sq_diag_expected, report.inv_sq_diag_worst_rel_err,
              inv_sq_tol, report.inv_sq_ok ? "ok" : "FAIL");
  if (!(report.logdet_ok && report.inv_ok && report.inv_sq_ok)) {
    return kExitAssertion;
  }
  return 0;
}

int run_e2e(const CommonOptions& opts) {
  ConfigHandle cfg;
  ModelHandle model;
  const int early = load_config_and_model(opts, &cfg, &model);
  if (early >= 0) return early;

  csifb_e2e_report report;
  const csifb_status status = csifb_e2e_check(cfg.ptr, model.ptr, &report);
  if (status != CSIFB_OK) return report_failure(status);
  print_header(cfg, model);
  std::printf("end-to-end distortion: mean=%.8g target=%.8g stderr=%.3g "
              "trials=%" PRId64 " skipped=%" PRId64 "\n",
              report.mean, report.target, report.std_error, report.trials,
              report.skipped);
  if (!report.pass) {
    std::fprintf(stderr, "assertion failure: |mean - target| > 3 stderr\n");
    return kExitAssertion;
  }
  std::printf("within 3 standard errors of the target\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rate-distortion analysis of CSI feedback under finite "
               "downlink training"};
  app.set_version_flag("--version", std::string(csifb_version()));
  app.require_subcommand(1);

  CommonOptions rdf_opts;
  std::uint64_t pilot_seed = 0;
  bool pilot_seed_set = false;
  bool rdf_csv = false;
  std::string rdf_dump_cov;
  CLI::App* rdf = app.add_subcommand(
      "rdf", "closed-form rate breakdown for one pilot realization");
  add_common(rdf, &rdf_opts, true);
  rdf->add_option("--pilot-seed", pilot_seed,
                  "seed of the pilot draw (defaults to the config seed)")
      ->each([&](const std::string&) { pilot_seed_set = true; });
  rdf->add_flag("--csv", rdf_csv, "also print a machine-readable CSV row");
  rdf->add_option("--dump-covariance", rdf_dump_cov,
                  "write the channel covariance to this path (text format)");

  CommonOptions bounds_opts;
  CLI::App* bounds = app.add_subcommand(
      "bounds", "deterministic bounds and asymptotic coefficients");
  add_common(bounds, &bounds_opts, true);

  CommonOptions fig_opts;
  CLI::App* figure2 = app.add_subcommand(
      "figure2", "training-length sweep with Monte Carlo verification; "
                 "writes sweep.csv and sweep.svg");
  add_common(figure2, &fig_opts, true);

  std::int64_t w_m = 2, w_n = 4, w_draws = 100000;
  double w_power = 1.0, w_inv_tol = 0.02, w_inv_sq_tol = 0.03;
  std::uint64_t w_seed = 42;
  CLI::App* wishart = app.add_subcommand(
      "wishart-check", "Monte Carlo check of complex Wishart moments");
  wishart->add_option("--m", w_m, "matrix rows");
  wishart->add_option("--n", w_n, "degrees of freedom (columns)");
  wishart->add_option("--power", w_power, "per-entry variance");
  wishart->add_option("--draws", w_draws, "Monte Carlo draws");
  wishart->add_option("--seed", w_seed, "random seed");
  wishart->add_option("--tol-inverse", w_inv_tol,
                      "relative tolerance for E[inverse] diagonals");
  wishart->add_option("--tol-inverse-sq", w_inv_sq_tol,
                      "relative tolerance for E[inverse^2] diagonals");

  CommonOptions e2e_opts;
  CLI::App* e2e = app.add_subcommand(
      "e2e-check", "simulate estimation plus rate-achieving reconstruction "
                   "and verify the achieved distortion");
  add_common(e2e, &e2e_opts, true);

  CLI11_PARSE(app, argc, argv);

  if (rdf->parsed()) {
    return run_rdf(rdf_opts, pilot_seed, pilot_seed_set, rdf_csv,
                   rdf_dump_cov);
  }
  if (bounds->parsed()) return run_bounds(bounds_opts);
  if (figure2->parsed()) return run_figure2(fig_opts);
  if (wishart->parsed()) {
    return run_wishart(w_m, w_n, w_power, w_draws, w_seed, w_inv_tol,
                       w_inv_sq_tol);
  }
  if (e2e->parsed()) return run_e2e(e2e_opts);
  return kExitConfig;
}
