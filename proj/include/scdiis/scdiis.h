/*
 * Copyright 2026 The scdiis Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SCDIIS_H
#define SCDIIS_H

/*
 * C interface to libscdiis.  Every object is an opaque handle released with
 * its *_free function (NULL is accepted).  Every function returning
 * scdiis_status leaves a message for the calling thread in
 * scdiis_last_error() when it fails.  Output handles are set to NULL on
 * failure unless documented otherwise.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SCDIIS_API __declspec(dllexport)
#else
#define SCDIIS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum scdiis_status {
    SCDIIS_OK = 0,
    SCDIIS_INVALID_ARGUMENT = 1,
    SCDIIS_DIMENSION_MISMATCH = 2,
    SCDIIS_LINEAR_DEPENDENCE = 3,
    SCDIIS_DEGENERATE_INPUT = 4,
    SCDIIS_FERMI_DEGENERACY = 5,
    SCDIIS_NO_CONVERGENCE = 6,
    SCDIIS_SINGULAR_DIIS_SYSTEM = 7,
    SCDIIS_PREDICTOR_FAILURE = 8,
    SCDIIS_GENERATION_EXHAUSTED = 9,
    SCDIIS_EMPTY_DATASET = 10,
    SCDIIS_SPECIES_MISMATCH = 11,
    SCDIIS_INSUFFICIENT_DATA = 12,
    SCDIIS_NUMERICAL_BLOWUP = 13,
    SCDIIS_IO_ERROR = 14,
    SCDIIS_PARSE_ERROR = 15,
    SCDIIS_INTERNAL_ERROR = 99
} scdiis_status;

typedef struct scdiis_config scdiis_config;
typedef struct scdiis_geometry scdiis_geometry;
typedef struct scdiis_matrix scdiis_matrix;
typedef struct scdiis_solution scdiis_solution;
typedef struct scdiis_dataset scdiis_dataset;
typedef struct scdiis_kernel scdiis_kernel;
typedef struct scdiis_predictor scdiis_predictor;
typedef struct scdiis_reports scdiis_reports;
typedef struct scdiis_correlation scdiis_correlation;
typedef struct scdiis_trajectory scdiis_trajectory;

SCDIIS_API const char* scdiis_version(void);
SCDIIS_API const char* scdiis_last_error(void);
/* "Ok", "InvalidArgument", ...; "InternalError" for SCDIIS_INTERNAL_ERROR. */
SCDIIS_API const char* scdiis_status_name(int status);

/* ---- configuration ---------------------------------------------------- */

/* All documented keys at their defaults. */
SCDIIS_API scdiis_status scdiis_config_new(scdiis_config** out);
/* Defaults overlaid with a key = value file. */
SCDIIS_API scdiis_status scdiis_config_load(const char* path, scdiis_config** out);
SCDIIS_API scdiis_status scdiis_config_set(scdiis_config* cfg, const char* key, const char* value);
/* Copies the value (NUL-terminated) into buf; *needed receives the length
 * including the terminator.  buf may be NULL when cap is 0. */
SCDIIS_API scdiis_status scdiis_config_get(const scdiis_config* cfg, const char* key, char* buf,
                                           size_t cap, size_t* needed);
/* Writes the resolved configuration, one sorted key = value per line. */
SCDIIS_API scdiis_status scdiis_config_write(const scdiis_config* cfg, const char* path);
SCDIIS_API void scdiis_config_free(scdiis_config* cfg);

/* ---- geometry --------------------------------------------------------- */

SCDIIS_API scdiis_status scdiis_geometry_read_xyz(const char* path, scdiis_geometry** out);
/* coords: 3 n_atoms values in A, species: n_atoms tags. */
SCDIIS_API scdiis_status scdiis_geometry_create(int n_atoms, const char* const* species,
                                                const double* coords, int n_electrons,
                                                scdiis_geometry** out);
SCDIIS_API int scdiis_geometry_n_atoms(const scdiis_geometry* g);
SCDIIS_API int scdiis_geometry_n_electrons(const scdiis_geometry* g);
/* Species tag of one atom; NULL when out of range.  Owned by the handle. */
SCDIIS_API const char* scdiis_geometry_species(const scdiis_geometry* g, int atom);
/* Copies 3 n_atoms coordinates. */
SCDIIS_API scdiis_status scdiis_geometry_coordinates(const scdiis_geometry* g, double* out);
SCDIIS_API scdiis_status scdiis_geometry_write_xyz(const scdiis_geometry* g, const char* path);
SCDIIS_API void scdiis_geometry_free(scdiis_geometry* g);

/* ---- matrices --------------------------------------------------------- */

/* data: n*n values, row-major. */
SCDIIS_API scdiis_status scdiis_matrix_create(int n, const double* data, scdiis_matrix** out);
SCDIIS_API scdiis_status scdiis_matrix_read(const char* path, scdiis_matrix** out);
SCDIIS_API scdiis_status scdiis_matrix_write(const scdiis_matrix* m, const char* path);
SCDIIS_API int scdiis_matrix_rows(const scdiis_matrix* m);
SCDIIS_API int scdiis_matrix_cols(const scdiis_matrix* m);
/* Copies rows*cols values, row-major. */
SCDIIS_API scdiis_status scdiis_matrix_data(const scdiis_matrix* m, double* out);
SCDIIS_API void scdiis_matrix_free(scdiis_matrix* m);

/* ---- SCF -------------------------------------------------------------- */

/* On SCDIIS_NO_CONVERGENCE *out still receives the best iterate. */
SCDIIS_API scdiis_status scdiis_scf_solve(const scdiis_config* cfg, const scdiis_geometry* g,
                                          scdiis_solution** out);
SCDIIS_API double scdiis_solution_e_total(const scdiis_solution* s);
SCDIIS_API double scdiis_solution_gap(const scdiis_solution* s);
SCDIIS_API double scdiis_solution_strict_diis(const scdiis_solution* s);
SCDIIS_API int scdiis_solution_iterations(const scdiis_solution* s);
SCDIIS_API int scdiis_solution_converged(const scdiis_solution* s);
/* which: 'H', 'D' or 'S'. */
SCDIIS_API scdiis_status scdiis_solution_matrix(const scdiis_solution* s, char which,
                                                scdiis_matrix** out);
/* H.scvm, D.scvm, S.scvm, solution.txt and scf_trace.csv in dir. */
SCDIIS_API scdiis_status scdiis_solution_write(const scdiis_solution* s, const char* dir);
SCDIIS_API void scdiis_solution_free(scdiis_solution* s);

/* ---- datasets --------------------------------------------------------- */

/* gen.* keys select mode and size; skipped samples are appended to
 * log_path when it is not NULL. */
SCDIIS_API scdiis_status scdiis_dataset_generate(const scdiis_config* cfg,
                                                 const scdiis_geometry* seed_geometry,
                                                 const char* log_path, scdiis_dataset** out);
SCDIIS_API scdiis_status scdiis_dataset_save(const scdiis_dataset* ds, const char* dir);
SCDIIS_API scdiis_status scdiis_dataset_load(const char* dir, scdiis_dataset** out);
SCDIIS_API int scdiis_dataset_size(const scdiis_dataset* ds);
SCDIIS_API scdiis_status scdiis_dataset_geometry(const scdiis_dataset* ds, int index,
                                                 scdiis_geometry** out);
SCDIIS_API void scdiis_dataset_free(scdiis_dataset* ds);

/* ---- surrogates ------------------------------------------------------- */

/* surrogate.bandwidth and surrogate.k_neighbors. */
SCDIIS_API scdiis_status scdiis_kernel_fit(const scdiis_config* cfg, const scdiis_dataset* ds,
                                           scdiis_kernel** out);
SCDIIS_API double scdiis_kernel_bandwidth(const scdiis_kernel* k);
/* surrogate.threshold_percentile of the leave-one-out self-DIIS values. */
SCDIIS_API scdiis_status scdiis_kernel_loo_threshold(const scdiis_config* cfg,
                                                     const scdiis_kernel* k,
                                                     const scdiis_dataset* ds, double* out);
SCDIIS_API void scdiis_kernel_free(scdiis_kernel* k);

SCDIIS_API scdiis_status scdiis_predictor_exact(const scdiis_config* cfg, scdiis_predictor** out);
/* validate.sigma, surrogate.noise_mode and the global seed. */
SCDIIS_API scdiis_status scdiis_predictor_oracle(const scdiis_config* cfg, scdiis_predictor** out);
SCDIIS_API scdiis_status scdiis_predictor_kernel(const scdiis_kernel* k, scdiis_predictor** out);
SCDIIS_API void scdiis_predictor_free(scdiis_predictor* p);

/* ---- validation ------------------------------------------------------- */

/* Oracle noise over the dataset labels; validate.n_sigma = 1 uses
 * validate.sigma, otherwise n_sigma log-spaced values in
 * [validate.sigma_min, validate.sigma_max]. */
SCDIIS_API scdiis_status scdiis_validate_oracle(const scdiis_config* cfg, const scdiis_dataset* ds,
                                                scdiis_reports** out);
SCDIIS_API scdiis_status scdiis_validate_predictor(const scdiis_config* cfg,
                                                   const scdiis_dataset* ds,
                                                   const scdiis_predictor* p, scdiis_reports** out);
/* dir/<entry>/H.scvm and D.scvm for every dataset entry. */
SCDIIS_API scdiis_status scdiis_validate_external(const scdiis_config* cfg,
                                                  const scdiis_dataset* ds, const char* dir,
                                                  scdiis_reports** out);
SCDIIS_API scdiis_status scdiis_reports_read_csv(const char* path, scdiis_reports** out);
SCDIIS_API scdiis_status scdiis_reports_write_csv(const scdiis_reports* r, const char* path);
SCDIIS_API int scdiis_reports_count(const scdiis_reports* r);
/* field: a report CSV column name (self_diis, strict_diis, mae_h, ...).
 * SCDIIS_INVALID_ARGUMENT when the value is absent in that row. */
SCDIIS_API scdiis_status scdiis_reports_value(const scdiis_reports* r, int row, const char* field,
                                              double* out);
SCDIIS_API void scdiis_reports_free(scdiis_reports* r);

/* ---- statistics ------------------------------------------------------- */

/* condition: "self_diis" or "strict_diis"; targets: comma-separated list of
 * strict_diis, mae (= mae_h), mae_h, mae_d, d_e_total, d_gap.  Binning
 * from stats.*. */
SCDIIS_API scdiis_status scdiis_correlation_run(const scdiis_config* cfg, const scdiis_reports* r,
                                                const char* condition, const char* targets,
                                                scdiis_correlation** out);
SCDIIS_API int scdiis_correlation_n_targets(const scdiis_correlation* c);
/* statistic: 0 = per-bin mean, 1 = per-bin std. */
SCDIIS_API scdiis_status scdiis_correlation_fit(const scdiis_correlation* c, int target,
                                                int statistic, double* slope, double* intercept,
                                                double* r_squared);
/* summary.csv, bins_<target>.csv and plot_<target>.csv in dir. */
SCDIIS_API scdiis_status scdiis_correlation_write(const scdiis_correlation* c, const char* dir);
SCDIIS_API void scdiis_correlation_free(scdiis_correlation* c);

/* ---- gradients and dynamics ------------------------------------------ */

/* d self_diis / d x for every coordinate (3 n_atoms values), grad.step. */
SCDIIS_API scdiis_status scdiis_self_diis_gradient(const scdiis_config* cfg,
                                                   const scdiis_geometry* g,
                                                   const scdiis_predictor* p, double* out);

/* md.* keys; predictor may be NULL in exact mode.  threshold overrides
 * md.threshold when md.threshold = auto.  A run that stops early returns
 * its status and still sets *out. */
SCDIIS_API scdiis_status scdiis_md_run(const scdiis_config* cfg, const scdiis_geometry* g0,
                                       const scdiis_predictor* p, double threshold,
                                       scdiis_trajectory** out);
SCDIIS_API int scdiis_trajectory_n_frames(const scdiis_trajectory* t);
SCDIIS_API int scdiis_trajectory_diverged(const scdiis_trajectory* t);
SCDIIS_API double scdiis_trajectory_threshold(const scdiis_trajectory* t);
/* field: temperature, e_total, max_force, self_diis, corrected, step. */
SCDIIS_API scdiis_status scdiis_trajectory_value(const scdiis_trajectory* t, int frame,
                                                 const char* field, double* out);
/* traj.xyz and md.csv in dir. */
SCDIIS_API scdiis_status scdiis_trajectory_write(const scdiis_trajectory* t, const char* dir);
SCDIIS_API void scdiis_trajectory_free(scdiis_trajectory* t);

#ifdef __cplusplus
}
#endif

#endif /* SCDIIS_H */
