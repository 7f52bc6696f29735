/* Licensed under the Apache License 2.0 (see LICENSE file). */

/*
 * C interface to the regime-switching TVTP library. All functions return a
 * status code; constructed objects come back through opaque handles that the
 * caller frees with the matching *_free function. On failure the thread-local
 * message from mstvtp_last_error() describes the problem.
 */

#ifndef MSTVTP_H
#define MSTVTP_H

#include <stdint.h>

#if defined(_WIN32)
#define MSTVTP_API __declspec(dllexport)
#else
#define MSTVTP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mstvtp_status {
  MSTVTP_OK = 0,
  MSTVTP_ERR_INVALID_ARGUMENT = 1,
  MSTVTP_ERR_DIMENSION = 2,
  MSTVTP_ERR_DOMAIN = 3,
  MSTVTP_ERR_NONFINITE = 4,
  MSTVTP_ERR_DEGENERATE = 5,
  MSTVTP_ERR_NONCONVERGENCE = 6,
  MSTVTP_ERR_IO = 7,
  MSTVTP_ERR_INTERNAL = 8
} mstvtp_status;

/* Transition-probability dynamics families. */
typedef enum mstvtp_dynamics {
  MSTVTP_DYN_CONSTANT = 0, /* fixed transition matrix */
  MSTVTP_DYN_TVP = 1,      /* driven by the lagged observation */
  MSTVTP_DYN_EXOG = 2,     /* driven by an exogenous covariate */
  MSTVTP_DYN_GAS = 3       /* driven by the scaled score */
} mstvtp_dynamics;

typedef struct mstvtp_model mstvtp_model;   /* specification + parameters */
typedef struct mstvtp_dataset mstvtp_dataset;
typedef struct mstvtp_sim_result mstvtp_sim_result;
typedef struct mstvtp_filter_result mstvtp_filter_result;
typedef struct mstvtp_fit_result mstvtp_fit_result;

MSTVTP_API const char* mstvtp_version(void);
MSTVTP_API const char* mstvtp_last_error(void);
MSTVTP_API void mstvtp_string_free(char* s);

/* ---------- model ---------- */

MSTVTP_API mstvtp_status mstvtp_model_create(int k, int diagonal,
                                             int common_variance,
                                             mstvtp_dynamics dynamics,
                                             mstvtp_model** out);

/* dyn1 = theta | gamma | A depending on the family, dyn2 = B (gas only);
 * pass NULL/0 for blocks the family does not use. */
MSTVTP_API mstvtp_status mstvtp_model_set_params(
    mstvtp_model* m, const double* mu, int n_mu, const double* sigma2,
    int n_sigma2, const double* f0, int n_f0, const double* dyn1, int n_dyn1,
    const double* dyn2, int n_dyn2);

MSTVTP_API mstvtp_status mstvtp_model_from_json(const char* json_text,
                                                mstvtp_model** out);
MSTVTP_API mstvtp_status mstvtp_model_from_json_file(const char* path,
                                                     mstvtp_model** out);
MSTVTP_API mstvtp_status mstvtp_model_to_json(const mstvtp_model* m,
                                              char** out_json);

/* True-parameter presets 1..9 of the simulation study. */
MSTVTP_API mstvtp_status mstvtp_dgp_preset(int id, mstvtp_model** out);

MSTVTP_API int mstvtp_model_k(const mstvtp_model* m);
MSTVTP_API int mstvtp_model_param_count(const mstvtp_model* m);
MSTVTP_API mstvtp_dynamics mstvtp_model_dynamics(const mstvtp_model* m);

/* Baseline transition matrix link(f0), row-major k*k. */
MSTVTP_API mstvtp_status mstvtp_model_transition_matrix(const mstvtp_model* m,
                                                        double* out);
MSTVTP_API void mstvtp_model_free(mstvtp_model* m);

/* ---------- dataset ---------- */

MSTVTP_API mstvtp_status mstvtp_dataset_create(const double* y, int n,
                                               const double* x, /* or NULL */
                                               mstvtp_dataset** out);
/* CSV with a header; requires a "y" column, uses "x" when present. */
MSTVTP_API mstvtp_status mstvtp_dataset_from_csv(const char* path,
                                                 mstvtp_dataset** out);
MSTVTP_API mstvtp_status mstvtp_dataset_to_csv(const mstvtp_dataset* d,
                                               const char* path);
MSTVTP_API int mstvtp_dataset_length(const mstvtp_dataset* d);
MSTVTP_API const double* mstvtp_dataset_y(const mstvtp_dataset* d);
MSTVTP_API const double* mstvtp_dataset_x(const mstvtp_dataset* d); /* NULL if none */
MSTVTP_API void mstvtp_dataset_free(mstvtp_dataset* d);

/* ---------- simulation ---------- */

MSTVTP_API mstvtp_status mstvtp_simulate(const mstvtp_model* m, int t_len,
                                         int burn_in, uint64_t seed,
                                         mstvtp_sim_result** out);
MSTVTP_API int mstvtp_sim_length(const mstvtp_sim_result* s);
MSTVTP_API const double* mstvtp_sim_y(const mstvtp_sim_result* s);
MSTVTP_API const int* mstvtp_sim_z(const mstvtp_sim_result* s); /* 1-based */
MSTVTP_API const double* mstvtp_sim_x(const mstvtp_sim_result* s); /* NULL if none */
MSTVTP_API const double* mstvtp_sim_pi_path(const mstvtp_sim_result* s);
/* Columns t,y,z and x when present. */
MSTVTP_API mstvtp_status mstvtp_sim_to_csv(const mstvtp_sim_result* s,
                                           const char* path);
MSTVTP_API mstvtp_status mstvtp_sim_to_dataset(const mstvtp_sim_result* s,
                                               mstvtp_dataset** out);
MSTVTP_API void mstvtp_sim_free(mstvtp_sim_result* s);

/* ---------- filtering ---------- */

MSTVTP_API mstvtp_status mstvtp_filter(const mstvtp_model* m,
                                       const mstvtp_dataset* d, int cutoff,
                                       mstvtp_filter_result** out);
MSTVTP_API double mstvtp_filter_loglik(const mstvtp_filter_result* f);
MSTVTP_API int mstvtp_filter_t_len(const mstvtp_filter_result* f);
MSTVTP_API int mstvtp_filter_k(const mstvtp_filter_result* f);
MSTVTP_API const double* mstvtp_filter_xi_pred(const mstvtp_filter_result* f);
MSTVTP_API const double* mstvtp_filter_xi_filt(const mstvtp_filter_result* f);
MSTVTP_API const double* mstvtp_filter_pi_path(const mstvtp_filter_result* f);
MSTVTP_API const double* mstvtp_filter_pred_mean(const mstvtp_filter_result* f);
MSTVTP_API const double* mstvtp_filter_pred_var(const mstvtp_filter_result* f);
MSTVTP_API int mstvtp_filter_degenerate(const mstvtp_filter_result* f);
/* Most probable regime per period, 1-based; out has t_len slots. */
MSTVTP_API mstvtp_status mstvtp_filter_classify(const mstvtp_filter_result* f,
                                                int* out);
MSTVTP_API void mstvtp_filter_free(mstvtp_filter_result* f);

/* One-step forecast errors over t > cutoff: out[0..3] = mafe, msfe, masfe,
 * mssfe. */
MSTVTP_API mstvtp_status mstvtp_forecast_metrics(const mstvtp_filter_result* f,
                                                 const mstvtp_dataset* d,
                                                 int cutoff,
                                                 double out_metrics[4]);

/* ---------- estimation ---------- */

MSTVTP_API mstvtp_status mstvtp_fit(const mstvtp_dataset* d, int k,
                                    int diagonal, int common_variance,
                                    mstvtp_dynamics dynamics, int n_starts,
                                    uint64_t seed, int cutoff, int threads,
                                    mstvtp_fit_result** out);
MSTVTP_API int mstvtp_fit_converged(const mstvtp_fit_result* r);
MSTVTP_API int mstvtp_fit_n_starts_converged(const mstvtp_fit_result* r);
MSTVTP_API double mstvtp_fit_loglik(const mstvtp_fit_result* r);
MSTVTP_API double mstvtp_fit_aic(const mstvtp_fit_result* r);
MSTVTP_API double mstvtp_fit_bic(const mstvtp_fit_result* r);
MSTVTP_API mstvtp_status mstvtp_fit_model(const mstvtp_fit_result* r,
                                          mstvtp_model** out);
MSTVTP_API mstvtp_status mstvtp_fit_to_json(const mstvtp_fit_result* r,
                                            char** out_json);
MSTVTP_API void mstvtp_fit_free(mstvtp_fit_result* r);

/* ---------- profile likelihood ---------- */

/* Fix the named coordinates (TransformMap naming, e.g. "a_1") at each grid
 * point and re-optimize the rest from the fitted model. grid is row-major
 * n_points x n_dims; out_values receives n_points maximized log-likelihoods
 * (NaN marks a failed inner optimization). */
MSTVTP_API mstvtp_status mstvtp_profile(const mstvtp_dataset* d,
                                        const mstvtp_model* fitted,
                                        const char* const* dims, int n_dims,
                                        const double* grid, int n_points,
                                        int cutoff, double* out_values);

/* ---------- monte carlo harness ---------- */

/* paper_grid != 0 runs the 18-cell study grid (replications/starts
 * overridable with > 0 values); otherwise config_path names a JSON scenario
 * file. Emits table3_recovery.csv, table4_coverage.csv, table5_forecast.csv,
 * table6_filtprob.csv and replications.jsonl under out_dir; an existing
 * replications.jsonl resumes the run. */
MSTVTP_API mstvtp_status mstvtp_mc_run(const char* config_path, int paper_grid,
                                       int replications_override,
                                       int n_starts_override,
                                       uint64_t base_seed, int burn_in,
                                       int cutoff, int threads,
                                       const char* out_dir, int verbose);

/* ---------- empirical pipeline ---------- */

/* maturities like "1,12,36,72", models like "const,tvp,exog,gas"; date range
 * strings are "YYYY-MM" or empty. Writes empirical_fit.csv,
 * empirical_params.csv and per-cell classification CSVs under out_dir. */
MSTVTP_API mstvtp_status mstvtp_empirical(const char* yields_csv,
                                          const char* maturities,
                                          const char* models, int k,
                                          int n_starts, uint64_t seed,
                                          int cutoff, int threads,
                                          const char* out_dir,
                                          const char* date_from,
                                          const char* date_to);

#ifdef __cplusplus
}
#endif

#endif /* MSTVTP_H */
