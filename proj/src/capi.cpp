#include "csifb.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

#include "csifb/config.hpp"
#include "csifb/experiments.hpp"
#include "csifb/matrix_io.hpp"
#include "csifb/report.hpp"

namespace {

thread_local std::string g_last_error;

constexpr char kVersion[] = "0.1.0";

csifb_status map_code(csifb::ErrorCode code) {
  using csifb::ErrorCode;
  switch (code) {
    case ErrorCode::ParseError:
      return CSIFB_ERR_CONFIG;
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidCorrelation:
    case ErrorCode::TierLevelsNotOrdered:
    case ErrorCode::DuplicateSubcarrier:
    case ErrorCode::IndexOutOfRange:
      return CSIFB_ERR_ARG;
    case ErrorCode::PreconditionViolated:
    case ErrorCode::DistortionOutOfRange:
    case ErrorCode::BudgetNonpositive:
    case ErrorCode::TooManySkipped:
    case ErrorCode::SingularCovariance:
      return CSIFB_ERR_PRECONDITION;
    case ErrorCode::DistortionBelowMmse:
      return CSIFB_ERR_INFEASIBLE;
    case ErrorCode::IoError:
      return CSIFB_ERR_IO;
    default:
      return CSIFB_ERR_NUMERIC;
  }
}

template <typename Fn>
csifb_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CSIFB_OK;
  } catch (const csifb::Error& e) {
    g_last_error = std::string(csifb::error_code_name(e.code())) + ": " + e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CSIFB_ERR_NUMERIC;
  } catch (...) {
    g_last_error = "unknown failure";
    return CSIFB_ERR_NUMERIC;
  }
}

csifb_status fail_arg(const char* message) {
  g_last_error = message;
  return CSIFB_ERR_ARG;
}

void copy_string(char* dst, size_t size, const std::string& src) {
  if (size == 0) return;
  std::snprintf(dst, size, "%s", src.c_str());
}

}  // namespace

struct csifb_config {
  csifb::ExperimentConfig impl;
};

struct csifb_model {
  csifb::ChannelModel impl;
};

struct csifb_sweep {
  csifb::SweepResult impl;
  std::string csv_path;
  std::string svg_path;
};

extern "C" {

const char* csifb_version(void) { return kVersion; }

const char* csifb_status_name(csifb_status status) {
  switch (status) {
    case CSIFB_OK: return "ok";
    case CSIFB_ERR_ARG: return "invalid argument";
    case CSIFB_ERR_CONFIG: return "configuration error";
    case CSIFB_ERR_PRECONDITION: return "precondition violated";
    case CSIFB_ERR_INFEASIBLE: return "infeasible distortion";
    case CSIFB_ERR_IO: return "i/o error";
    case CSIFB_ERR_NUMERIC: return "numerical failure";
  }
  return "unknown";
}

const char* csifb_last_error(void) { return g_last_error.c_str(); }

csifb_status csifb_config_load(const char* path, csifb_config** out) {
  if (path == nullptr || out == nullptr) return fail_arg("null argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = new csifb_config{csifb::parse_config_file(path)};
    *out = cfg;
  });
}

csifb_status csifb_config_parse(const char* text, csifb_config** out) {
  if (text == nullptr || out == nullptr) return fail_arg("null argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = new csifb_config{csifb::parse_config_text(text)};
    *out = cfg;
  });
}

void csifb_config_free(csifb_config* cfg) { delete cfg; }

csifb_status csifb_config_set_seed(csifb_config* cfg, uint64_t seed) {
  if (cfg == nullptr) return fail_arg("null config");
  cfg->impl.seed = seed;
  return CSIFB_OK;
}

csifb_status csifb_config_set_trials(csifb_config* cfg, int64_t trials) {
  if (cfg == nullptr) return fail_arg("null config");
  if (trials < 2) return fail_arg("trials must be >= 2");
  cfg->impl.trials = trials;
  return CSIFB_OK;
}

csifb_status csifb_config_set_out_dir(csifb_config* cfg, const char* dir) {
  if (cfg == nullptr || dir == nullptr) return fail_arg("null argument");
  cfg->impl.out_dir = dir;
  return CSIFB_OK;
}

csifb_status csifb_config_set_rate_unit_bits(csifb_config* cfg, int bits) {
  if (cfg == nullptr) return fail_arg("null config");
  cfg->impl.rate_in_bits = bits != 0;
  return CSIFB_OK;
}

csifb_status csifb_config_set_training_symbols(csifb_config* cfg, int64_t n) {
  if (cfg == nullptr) return fail_arg("null config");
  if (n < 1) return fail_arg("training_symbols must be >= 1");
  cfg->impl.system.training_symbols = static_cast<int>(n);
  return CSIFB_OK;
}

int csifb_config_rate_in_bits(const csifb_config* cfg) {
  return cfg != nullptr && cfg->impl.rate_in_bits ? 1 : 0;
}

uint64_t csifb_config_seed(const csifb_config* cfg) {
  return cfg != nullptr ? cfg->impl.seed : 0;
}

int64_t csifb_config_trials(const csifb_config* cfg) {
  return cfg != nullptr ? cfg->impl.trials : 0;
}

double csifb_config_distortion(const csifb_config* cfg) {
  return cfg != nullptr ? cfg->impl.system.distortion_budget : 0.0;
}

csifb_status csifb_config_describe(const csifb_config* cfg, char* buffer,
                                   size_t size) {
  if (cfg == nullptr || buffer == nullptr) return fail_arg("null argument");
  const csifb::SystemConfig& s = cfg->impl.system;
  char grid[160] = "";
  if (!cfg->impl.training_grid.empty()) {
    std::string g = " grid=";
    for (std::size_t i = 0; i < cfg->impl.training_grid.size(); ++i) {
      if (i > 0) g += ',';
      g += std::to_string(cfg->impl.training_grid[i]);
    }
    copy_string(grid, sizeof(grid), g);
  }
  std::snprintf(buffer, size,
                "antennas=%d subcarriers=%d pilot_subcarriers=%d "
                "training_symbols=%d snr=%.6g d=%.6g epsilon=%.3g trials=%lld "
                "seed=%llu unit=%s%s",
                s.tx_antennas, s.subcarriers, s.pilot_subcarriers,
                s.training_symbols, s.snr_downlink, s.distortion_budget,
                s.epsilon, static_cast<long long>(cfg->impl.trials),
                static_cast<unsigned long long>(cfg->impl.seed),
                cfg->impl.rate_in_bits ? "bits" : "nats", grid);
  return CSIFB_OK;
}

csifb_status csifb_model_create(const csifb_config* cfg, csifb_model** out) {
  if (cfg == nullptr || out == nullptr) return fail_arg("null argument");
  *out = nullptr;
  return guarded([&] {
    auto model = new csifb_model{csifb::build_covariance(cfg->impl)};
    *out = model;
  });
}

csifb_status csifb_model_load_text(const char* path, csifb_model** out) {
  if (path == nullptr || out == nullptr) return fail_arg("null argument");
  *out = nullptr;
  return guarded([&] {
    auto model = new csifb_model{
        csifb::ChannelModel::from_covariance(csifb::load_matrix_text(path))};
    *out = model;
  });
}

csifb_status csifb_model_save_text(const csifb_model* model, const char* path) {
  if (model == nullptr || path == nullptr) return fail_arg("null argument");
  return guarded([&] { csifb::save_matrix_text(model->impl.cov, path); });
}

void csifb_model_free(csifb_model* model) { delete model; }

int64_t csifb_model_dim(const csifb_model* model) {
  return model != nullptr ? static_cast<int64_t>(model->impl.dim()) : 0;
}

int64_t csifb_model_rank(const csifb_model* model) {
  return model != nullptr ? static_cast<int64_t>(model->impl.rank()) : 0;
}

double csifb_model_trace(const csifb_model* model) {
  return model != nullptr ? model->impl.trace() : 0.0;
}

csifb_status csifb_rdf_eval(const csifb_config* cfg, const csifb_model* model,
                            uint64_t pilot_seed, csifb_rdf_report* out) {
  if (cfg == nullptr || model == nullptr || out == nullptr) {
    return fail_arg("null argument");
  }
  std::memset(out, 0, sizeof(*out));
  return guarded([&] {
    const csifb::SystemConfig& sys = cfg->impl.system;
    sys.validate();
    csifb::Rng rng(pilot_seed);
    const csifb::PilotMatrix pilot = csifb::sample_pilot(sys, rng);
    const csifb::EffectiveMatrix eff = csifb::effective_matrix(model->impl, pilot);
    const csifb::MmseResult est = csifb::mmse(model->impl, eff, pilot);
    const csifb::EntropySet ent = csifb::entropies(model->impl, eff, est);
    const auto [d_min, d_max] = csifb::distortion_range(est, model->impl);

    out->distortion_budget = sys.distortion_budget;
    out->d_min = d_min;
    out->d_max = d_max;
    out->d_mmse = est.d_mmse;
    out->h_channel = ent.h_channel;
    out->h_training = ent.h_training;
    out->h_training_noiseless = ent.h_training_noiseless;
    out->h_estimate = ent.h_estimate;
    out->rank_channel = ent.rank_channel;
    out->rank_training = ent.rank_training;
    out->rank_training_noiseless = ent.rank_training_noiseless;
    out->rank_estimate = ent.rank_estimate;

    const csifb::RdfBreakdown bd =
        csifb::overall_rdf(model->impl, est, sys.distortion_budget);
    out->direct_rate = bd.direct_rate;
    out->source_delta = bd.source_delta;
    out->distortion_delta = bd.distortion_delta;
    out->total_rate = bd.total;
    out->effective_budget = bd.d_effective;
    out->active_rank = bd.active_rank;
    out->extended_path = bd.extended_path ? 1 : 0;
    out->distortion_check_ok = est.consistent && bd.compact_consistent ? 1 : 0;
  });
}

csifb_status csifb_bounds_eval(const csifb_config* cfg,
                               const csifb_model* model,
                               csifb_bounds_report* out) {
  if (cfg == nullptr || model == nullptr || out == nullptr) {
    return fail_arg("null argument");
  }
  std::memset(out, 0, sizeof(*out));
  return guarded([&] {
    const csifb::SystemConfig& sys = cfg->impl.system;
    sys.validate();
    const csifb::BoundSet set = csifb::evaluate_bounds(sys, model->impl);
    auto fill = [](csifb_bound* dst, const csifb::BoundValue& src) {
      dst->value = src.value;
      dst->valid = src.valid ? 1 : 0;
      copy_string(dst->why_invalid, sizeof(dst->why_invalid), src.why_invalid);
    };
    fill(&out->source_delta_lo, set.source_delta_lo);
    fill(&out->source_delta_hi, set.source_delta_hi);
    fill(&out->mmse_lo, set.mmse_lo);
    fill(&out->mmse_hi, set.mmse_hi);
    fill(&out->distortion_delta_lo, set.distortion_delta_lo);
    fill(&out->distortion_delta_hi, set.distortion_delta_hi);
    fill(&out->overall_lo, set.overall_lo);
    fill(&out->overall_hi, set.overall_hi);

    out->direct_rate =
        csifb::direct_rate_term(model->impl, sys.distortion_budget);
    try {
      const csifb::AsymptoticCoefficients c =
          csifb::asymptotic_coefficients(sys, model->impl);
      out->coefficients_valid = 1;
      out->coeff_source_lo = c.source_lo;
      out->coeff_source_hi = c.source_hi;
      out->coeff_mmse_slope = c.mmse_slope;
      out->coeff_distortion_lo = c.distortion_lo;
      out->coeff_distortion_hi = c.distortion_hi;
      out->coeff_overall_lo = c.overall_lo;
      out->coeff_overall_hi = c.overall_hi;
    } catch (const csifb::Error& e) {
      out->coefficients_valid = 0;
      copy_string(out->coefficients_why_invalid,
                  sizeof(out->coefficients_why_invalid), e.what());
    }
  });
}

csifb_status csifb_figure2_run(const csifb_config* cfg,
                               const csifb_model* model, csifb_sweep** out) {
  if (cfg == nullptr || model == nullptr || out == nullptr) {
    return fail_arg("null argument");
  }
  *out = nullptr;
  return guarded([&] {
    const csifb::ExperimentConfig& exp = cfg->impl;
    exp.system.validate();
    if (exp.training_grid.empty()) {
      csifb::raise(csifb::ErrorCode::ParseError,
                   "figure2 needs a non-empty training_grid");
    }
    auto sweep = std::make_unique<csifb_sweep>();
    sweep->impl = csifb::sweep_training_symbols(
        exp.system, model->impl, exp.training_grid, exp.trials, exp.seed);

    std::filesystem::create_directories(exp.out_dir);
    sweep->csv_path =
        (std::filesystem::path(exp.out_dir) / "sweep.csv").string();
    sweep->svg_path =
        (std::filesystem::path(exp.out_dir) / "sweep.svg").string();
    csifb::write_sweep_csv(sweep->impl, sweep->csv_path);
    csifb::write_sweep_svg(sweep->impl, sweep->svg_path);
    *out = sweep.release();
  });
}

void csifb_sweep_free(csifb_sweep* sweep) { delete sweep; }

int64_t csifb_sweep_point_count(const csifb_sweep* sweep) {
  return sweep != nullptr ? static_cast<int64_t>(sweep->impl.points.size()) : 0;
}

csifb_status csifb_sweep_point_get(const csifb_sweep* sweep, int64_t index,
                                   csifb_sweep_point* out) {
  if (sweep == nullptr || out == nullptr) return fail_arg("null argument");
  if (index < 0 || index >= static_cast<int64_t>(sweep->impl.points.size())) {
    return fail_arg("sweep point index out of range");
  }
  std::memset(out, 0, sizeof(*out));
  const csifb::SweepPoint& p = sweep->impl.points[static_cast<std::size_t>(index)];
  out->training_symbols = p.training_symbols;
  out->source_delta_mean = p.mc.source_delta.mean;
  out->source_delta_stderr = p.mc.source_delta.std_error;
  out->mmse_mean = p.mc.mmse.mean;
  out->mmse_stderr = p.mc.mmse.std_error;
  out->distortion_delta_mean = p.mc.distortion_delta.mean;
  out->distortion_delta_stderr = p.mc.distortion_delta.std_error;
  out->total_mean = p.mc.total.mean;
  out->total_stderr = p.mc.total.std_error;
  out->gap_mean = p.mc.gap.mean;
  out->gap_stderr = p.mc.gap.std_error;
  out->skipped = p.mc.skipped;
  out->epsilon_violation_fraction = p.mc.epsilon_violation_fraction;
  out->extended_fraction = p.mc.extended_fraction;
  out->numeric_warnings = p.mc.numeric_warnings;
  out->sandwich_ok = p.sandwich_ok ? 1 : 0;

  auto fill = [](csifb_bound* dst, const csifb::BoundValue& src) {
    dst->value = src.value;
    dst->valid = src.valid ? 1 : 0;
    copy_string(dst->why_invalid, sizeof(dst->why_invalid), src.why_invalid);
  };
  fill(&out->bounds.source_delta_lo, p.bounds.source_delta_lo);
  fill(&out->bounds.source_delta_hi, p.bounds.source_delta_hi);
  fill(&out->bounds.mmse_lo, p.bounds.mmse_lo);
  fill(&out->bounds.mmse_hi, p.bounds.mmse_hi);
  fill(&out->bounds.distortion_delta_lo, p.bounds.distortion_delta_lo);
  fill(&out->bounds.distortion_delta_hi, p.bounds.distortion_delta_hi);
  fill(&out->bounds.overall_lo, p.bounds.overall_lo);
  fill(&out->bounds.overall_hi, p.bounds.overall_hi);
  out->bounds.direct_rate = sweep->impl.direct_rate;
  return CSIFB_OK;
}

csifb_status csifb_sweep_summary_get(const csifb_sweep* sweep,
                                     csifb_sweep_summary* out) {
  if (sweep == nullptr || out == nullptr) return fail_arg("null argument");
  std::memset(out, 0, sizeof(*out));
  out->points = static_cast<int64_t>(sweep->impl.points.size());
  out->direct_rate = sweep->impl.direct_rate;
  out->gap_loglog_slope = sweep->impl.gap_loglog_slope;
  out->gap_loglog_slope_valid = sweep->impl.gap_loglog_slope_valid ? 1 : 0;
  out->gap_coefficient = sweep->impl.gap_coefficient;
  out->gap_fit_residual = sweep->impl.gap_fit_residual;
  out->mmse_coefficient = sweep->impl.mmse_coefficient;
  out->mmse_fit_residual = sweep->impl.mmse_fit_residual;
  out->source_delta_coefficient = sweep->impl.source_delta_coefficient;
  out->source_delta_fit_residual = sweep->impl.source_delta_fit_residual;
  out->distortion_delta_coefficient = sweep->impl.distortion_delta_coefficient;
  out->distortion_delta_fit_residual = sweep->impl.distortion_delta_fit_residual;
  out->all_sandwich_ok = sweep->impl.all_sandwich_ok ? 1 : 0;
  copy_string(out->csv_path, sizeof(out->csv_path), sweep->csv_path);
  copy_string(out->svg_path, sizeof(out->svg_path), sweep->svg_path);
  return CSIFB_OK;
}

csifb_status csifb_wishart_check(int64_t m, int64_t n, double power,
                                 int64_t draws, uint64_t seed, double inv_tol,
                                 double inv_sq_tol, csifb_wishart_report* out) {
  if (out == nullptr) return fail_arg("null output");
  std::memset(out, 0, sizeof(*out));
  return guarded([&] {
    const csifb::WishartCheck check = csifb::wishart_mc_check(
        static_cast<int>(m), static_cast<int>(n), power, draws, seed, inv_tol,
        inv_sq_tol);
    out->logdet_mean = check.logdet_mean;
    out->logdet_stderr = check.logdet_std_error;
    out->logdet_expected = check.logdet_expected;
    out->inv_diag_expected = check.inv_diag_expected;
    out->inv_diag_worst_rel_err = check.inv_diag_worst_rel_err;
    out->inv_sq_diag_expected = check.inv_sq_diag_expected;
    out->inv_sq_diag_worst_rel_err = check.inv_sq_diag_worst_rel_err;
    out->draws = check.draws;
    out->logdet_ok = check.logdet_ok ? 1 : 0;
    out->inv_ok = check.inv_ok ? 1 : 0;
    out->inv_sq_ok = check.inv_sq_ok ? 1 : 0;
  });
}

csifb_status csifb_e2e_check(const csifb_config* cfg, const csifb_model* model,
                             csifb_e2e_report* out) {
  if (cfg == nullptr || model == nullptr || out == nullptr) {
    return fail_arg("null argument");
  }
  std::memset(out, 0, sizeof(*out));
  return guarded([&] {
    const csifb::McEstimate est = csifb::e2e_distortion_check(
        cfg->impl.system, model->impl, cfg->impl.trials, cfg->impl.seed);
    out->mean = est.mean;
    out->std_error = est.std_error;
    out->target = cfg->impl.system.distortion_budget;
    out->trials = est.trials;
    out->skipped = est.skipped;
    out->pass =
        std::abs(est.mean - out->target) <= 3.0 * est.std_error ? 1 : 0;
  });
}

}  // extern "C"
