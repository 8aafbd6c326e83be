/*
 * csifb - rate-distortion analysis of CSI feedback under finite downlink
 * training.
 *
 * C interface to the shared library. All objects are opaque handles owned
 * by the library and released with the matching *_free call. Functions
 * return CSIFB_OK on success; on failure they return a status code and
 * leave a human-readable message in csifb_last_error() (thread-local,
 * valid until the next library call on the same thread).
 *
 * All rates are in nats. Conversion to bits is a presentation concern
 * (multiply by 1/ln 2); csifb_config_rate_in_bits reports what the
 * configuration asked for.
 */

#ifndef CSIFB_H
#define CSIFB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32) && defined(CSIFB_BUILD_SHARED)
#define CSIFB_API __declspec(dllexport)
#elif defined(__GNUC__) && defined(CSIFB_BUILD_SHARED)
#define CSIFB_API __attribute__((visibility("default")))
#else
#define CSIFB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum csifb_status {
  CSIFB_OK = 0,
  CSIFB_ERR_ARG = 1,          /* null handle / invalid parameter */
  CSIFB_ERR_CONFIG = 2,       /* config parse or validation failure */
  CSIFB_ERR_PRECONDITION = 3, /* operation hypotheses not met */
  CSIFB_ERR_INFEASIBLE = 4,   /* requested distortion below the mmse floor */
  CSIFB_ERR_IO = 5,           /* file read/write failure */
  CSIFB_ERR_NUMERIC = 6       /* numerical failure inside the library */
} csifb_status;

typedef struct csifb_config csifb_config;
typedef struct csifb_model csifb_model;
typedef struct csifb_sweep csifb_sweep;

CSIFB_API const char* csifb_version(void);
CSIFB_API const char* csifb_status_name(csifb_status status);
CSIFB_API const char* csifb_last_error(void);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */
/* ------------------------------------------------------------------ */

CSIFB_API csifb_status csifb_config_load(const char* path,
                                         csifb_config** out);
CSIFB_API csifb_status csifb_config_parse(const char* text,
                                          csifb_config** out);
CSIFB_API void csifb_config_free(csifb_config* cfg);

CSIFB_API csifb_status csifb_config_set_seed(csifb_config* cfg,
                                             uint64_t seed);
CSIFB_API csifb_status csifb_config_set_trials(csifb_config* cfg,
                                               int64_t trials);
CSIFB_API csifb_status csifb_config_set_out_dir(csifb_config* cfg,
                                                const char* dir);
CSIFB_API csifb_status csifb_config_set_rate_unit_bits(csifb_config* cfg,
                                                       int bits);
CSIFB_API csifb_status csifb_config_set_training_symbols(csifb_config* cfg,
                                                         int64_t n);

CSIFB_API int csifb_config_rate_in_bits(const csifb_config* cfg);
CSIFB_API uint64_t csifb_config_seed(const csifb_config* cfg);
CSIFB_API int64_t csifb_config_trials(const csifb_config* cfg);
CSIFB_API double csifb_config_distortion(const csifb_config* cfg);

/* One-line human-readable summary of the configuration. */
CSIFB_API csifb_status csifb_config_describe(const csifb_config* cfg,
                                             char* buffer, size_t size);

/* ------------------------------------------------------------------ */
/* Channel model                                                       */
/* ------------------------------------------------------------------ */

CSIFB_API csifb_status csifb_model_create(const csifb_config* cfg,
                                          csifb_model** out);
/* Text matrix format: first line N, then N rows of N `re,im` pairs. */
CSIFB_API csifb_status csifb_model_load_text(const char* path,
                                             csifb_model** out);
CSIFB_API csifb_status csifb_model_save_text(const csifb_model* model,
                                             const char* path);
CSIFB_API void csifb_model_free(csifb_model* model);

CSIFB_API int64_t csifb_model_dim(const csifb_model* model);
CSIFB_API int64_t csifb_model_rank(const csifb_model* model);
CSIFB_API double csifb_model_trace(const csifb_model* model);

/* ------------------------------------------------------------------ */
/* Closed-form rate for one pilot realization                          */
/* ------------------------------------------------------------------ */

typedef struct csifb_rdf_report {
  double direct_rate;      /* pilot-independent baseline term */
  double source_delta;     /* rate change from encoding the estimate */
  double distortion_delta; /* rate change from the reduced budget */
  double total_rate;       /* sum of the three terms */
  double distortion_budget;
  double effective_budget; /* budget minus estimation distortion */
  double d_min;            /* estimation distortion for this draw */
  double d_max;            /* upper end of the closed-form range */
  double d_mmse;
  int64_t active_rank;
  int extended_path; /* 1 when the budget exceeded d_max */
  double h_channel;
  double h_training;
  double h_training_noiseless;
  double h_estimate;
  int64_t rank_channel;
  int64_t rank_training;
  int64_t rank_training_noiseless;
  int64_t rank_estimate;
  /* 0 when the two distortion routes disagreed beyond 1e-9 relative */
  int distortion_check_ok;
} csifb_rdf_report;

/* Evaluates the rate decomposition for the pilot draw seeded by
 * pilot_seed. Returns CSIFB_ERR_INFEASIBLE (with d_min/d_max filled in)
 * when the configured budget is at or below the estimation distortion. */
CSIFB_API csifb_status csifb_rdf_eval(const csifb_config* cfg,
                                      const csifb_model* model,
                                      uint64_t pilot_seed,
                                      csifb_rdf_report* out);

/* ------------------------------------------------------------------ */
/* Deterministic bounds and asymptotic coefficients                    */
/* ------------------------------------------------------------------ */

typedef struct csifb_bound {
  double value;
  int valid;
  char why_invalid[160];
} csifb_bound;

typedef struct csifb_bounds_report {
  csifb_bound source_delta_lo, source_delta_hi;
  csifb_bound mmse_lo, mmse_hi;
  csifb_bound distortion_delta_lo, distortion_delta_hi;
  csifb_bound overall_lo, overall_hi;
  /* 1/training_symbols coefficients; valid needs an invertible covariance */
  int coefficients_valid;
  char coefficients_why_invalid[160];
  double coeff_source_lo, coeff_source_hi;
  double coeff_mmse_slope;
  double coeff_distortion_lo, coeff_distortion_hi;
  double coeff_overall_lo, coeff_overall_hi;
  double direct_rate; /* baseline term at the configured budget */
} csifb_bounds_report;

CSIFB_API csifb_status csifb_bounds_eval(const csifb_config* cfg,
                                         const csifb_model* model,
                                         csifb_bounds_report* out);

/* ------------------------------------------------------------------ */
/* Training-length sweep (the headline experiment)                     */
/* ------------------------------------------------------------------ */

typedef struct csifb_sweep_point {
  int64_t training_symbols;
  double source_delta_mean, source_delta_stderr;
  double mmse_mean, mmse_stderr;
  double distortion_delta_mean, distortion_delta_stderr;
  double total_mean, total_stderr;
  double gap_mean, gap_stderr;
  int64_t skipped;
  double epsilon_violation_fraction;
  double extended_fraction; /* draws beyond the uniform-allocation range */
  int64_t numeric_warnings;  /* trials whose distortion cross-check tripped */
  csifb_bounds_report bounds;
  int sandwich_ok; /* MC mean within every valid bound +- 3 sigma */
} csifb_sweep_point;

typedef struct csifb_sweep_summary {
  int64_t points;
  double direct_rate;
  double gap_loglog_slope;
  int gap_loglog_slope_valid;
  double gap_coefficient;
  double gap_fit_residual;
  double mmse_coefficient;
  double mmse_fit_residual;
  double source_delta_coefficient;
  double source_delta_fit_residual;
  double distortion_delta_coefficient;
  double distortion_delta_fit_residual;
  int all_sandwich_ok;
  char csv_path[512];
  char svg_path[512];
} csifb_sweep_summary;

/* Runs the sweep over the configured training grid and writes sweep.csv
 * and sweep.svg into the configured output directory. The run itself
 * succeeding is independent of the sandwich assertions; inspect
 * all_sandwich_ok / per-point flags for those. */
CSIFB_API csifb_status csifb_figure2_run(const csifb_config* cfg,
                                         const csifb_model* model,
                                         csifb_sweep** out);
CSIFB_API void csifb_sweep_free(csifb_sweep* sweep);
CSIFB_API int64_t csifb_sweep_point_count(const csifb_sweep* sweep);
CSIFB_API csifb_status csifb_sweep_point_get(const csifb_sweep* sweep,
                                             int64_t index,
                                             csifb_sweep_point* out);
CSIFB_API csifb_status csifb_sweep_summary_get(const csifb_sweep* sweep,
                                               csifb_sweep_summary* out);

/* ------------------------------------------------------------------ */
/* Verification helpers                                                */
/* ------------------------------------------------------------------ */

typedef struct csifb_wishart_report {
  double logdet_mean, logdet_stderr, logdet_expected;
  double inv_diag_expected, inv_diag_worst_rel_err;
  double inv_sq_diag_expected, inv_sq_diag_worst_rel_err;
  int64_t draws;
  int logdet_ok, inv_ok, inv_sq_ok;
} csifb_wishart_report;

CSIFB_API csifb_status csifb_wishart_check(int64_t m, int64_t n, double power,
                                           int64_t draws, uint64_t seed,
                                           double inv_tol, double inv_sq_tol,
                                           csifb_wishart_report* out);

typedef struct csifb_e2e_report {
  double mean, std_error, target;
  int64_t trials, skipped;
  int pass; /* |mean - target| <= 3 * std_error */
} csifb_e2e_report;

CSIFB_API csifb_status csifb_e2e_check(const csifb_config* cfg,
                                       const csifb_model* model,
                                       csifb_e2e_report* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CSIFB_H */
