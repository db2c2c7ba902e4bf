// Copyright 2026 The MIENF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIENF_MIENF_H_
#define MIENF_MIENF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MIENF_API __declspec(dllexport)
#else
#define MIENF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every fallible call returns one of these; on failure a
 * thread-local message is available from mienf_last_error(). */
typedef enum mienf_status {
  MIENF_OK = 0,
  MIENF_INVALID_ARGUMENT = 1,
  MIENF_SHAPE_MISMATCH = 2,
  MIENF_NOT_POSITIVE_DEFINITE = 3,
  MIENF_NO_CONVERGENCE = 4,
  MIENF_DOMAIN_ERROR = 5,
  MIENF_NON_FINITE = 6,
  MIENF_STALE_TAPE = 7,
  MIENF_INSUFFICIENT_SAMPLES = 8,
  MIENF_TARGET_BELOW_CORRECTION = 9,
  MIENF_UNSUPPORTED_FAMILY = 10,
  MIENF_IO_ERROR = 11,
  MIENF_PARSE_ERROR = 12,
  MIENF_INTERNAL = 99
} mienf_status;

typedef struct mienf_params mienf_params;
typedef struct mienf_dataset mienf_dataset;
typedef struct mienf_report mienf_report;
typedef struct mienf_sweep mienf_sweep;

MIENF_API const char* mienf_version(void);
MIENF_API const char* mienf_status_name(mienf_status status);
/* Message of the last failed call on this thread ("" if none). */
MIENF_API const char* mienf_last_error(void);
/* Frees strings returned through char** out-parameters. */
MIENF_API void mienf_string_free(char* s);

/* ---- experiment parameters (key = value settings) ---- */
MIENF_API mienf_status mienf_params_create(mienf_params** out);
MIENF_API void mienf_params_destroy(mienf_params* params);
/* Keys as in spec files, e.g. "family", "dim", "train.epochs", "grid.steps". */
MIENF_API mienf_status mienf_params_set(mienf_params* params, const char* key, const char* value);
MIENF_API mienf_status mienf_params_load_string(mienf_params* params, const char* text);
MIENF_API mienf_status mienf_params_load_file(mienf_params* params, const char* path);
MIENF_API mienf_status mienf_params_validate(const mienf_params* params);
/* Output path from the "output" key; NULL when unset. Owned by params. */
MIENF_API const char* mienf_params_output(const mienf_params* params);
/* Copies up to `capacity` MI grid points into `out`; `count` receives the grid size. */
MIENF_API mienf_status mienf_params_grid(const mienf_params* params, double* out, size_t capacity, size_t* count);

/* ---- datasets ---- */
MIENF_API mienf_status mienf_dataset_generate(const mienf_params* params, double target_mi, uint64_t seed,
                                              mienf_dataset** out);
/* Row-major n x dim_x and n x dim_y arrays are copied. */
MIENF_API mienf_status mienf_dataset_from_arrays(const double* x, size_t dim_x, const double* y, size_t dim_y,
                                                 size_t rows, mienf_dataset** out);
MIENF_API mienf_status mienf_dataset_load(const char* csv_path, mienf_dataset** out);
/* Writes the CSV and a "<csv_path>.meta.json" sidecar. */
MIENF_API mienf_status mienf_dataset_save(const mienf_dataset* dataset, const char* csv_path);
/* Mapping chain such as "gaussian_cdf" or "affine_mix+asinh". */
MIENF_API mienf_status mienf_dataset_apply_mapping(mienf_dataset* dataset, const char* mapping, uint64_t seed);
MIENF_API void mienf_dataset_destroy(mienf_dataset* dataset);
MIENF_API size_t mienf_dataset_rows(const mienf_dataset* dataset);
MIENF_API size_t mienf_dataset_dim_x(const mienf_dataset* dataset);
MIENF_API size_t mienf_dataset_dim_y(const mienf_dataset* dataset);
MIENF_API double mienf_dataset_true_mi(const mienf_dataset* dataset);
/* Copies x (or y) row-major into out, which must hold rows * dim values. */
MIENF_API mienf_status mienf_dataset_copy_x(const mienf_dataset* dataset, double* out, size_t capacity);
MIENF_API mienf_status mienf_dataset_copy_y(const mienf_dataset* dataset, double* out, size_t capacity);

/* ---- estimation ---- */
/* Runs the estimator named by the "estimator" key. */
MIENF_API mienf_status mienf_estimate(const mienf_params* params, const mienf_dataset* dataset, uint64_t seed,
                                      mienf_report** out);
MIENF_API void mienf_report_destroy(mienf_report* report);
MIENF_API double mienf_report_point(const mienf_report* report);
MIENF_API double mienf_report_ci_low(const mienf_report* report);
MIENF_API double mienf_report_ci_high(const mienf_report* report);
MIENF_API double mienf_report_final_loglik(const mienf_report* report);
MIENF_API double mienf_report_kld_lower_bound(const mienf_report* report);
MIENF_API size_t mienf_report_trace_length(const mienf_report* report);
MIENF_API mienf_status mienf_report_trace_at(const mienf_report* report, size_t index, size_t* epoch,
                                             double* loglik, double* estimate);
MIENF_API mienf_status mienf_report_to_json(const mienf_report* report, char** out);
MIENF_API mienf_status mienf_report_write_trace_csv(const mienf_report* report, const char* path);

/* ---- sweeps ---- */
MIENF_API mienf_status mienf_sweep_run(const mienf_params* params, size_t jobs, mienf_sweep** out);
MIENF_API void mienf_sweep_destroy(mienf_sweep* sweep);
MIENF_API size_t mienf_sweep_row_count(const mienf_sweep* sweep);
MIENF_API size_t mienf_sweep_error_count(const mienf_sweep* sweep);
MIENF_API double mienf_sweep_rmse(const mienf_sweep* sweep);
MIENF_API mienf_status mienf_sweep_row(const mienf_sweep* sweep, size_t index, double* true_mi, size_t* repeat,
                                       double* estimate, double* ci_low, double* ci_high, double* seconds);
/* Error text of a failed row, "" for successful rows. Owned by the sweep. */
MIENF_API const char* mienf_sweep_row_error(const mienf_sweep* sweep, size_t index);
/* format: "csv" or "json". */
MIENF_API mienf_status mienf_sweep_write(const mienf_sweep* sweep, const char* path, const char* format);
MIENF_API mienf_status mienf_sweep_to_string(const mienf_sweep* sweep, const char* format, char** out);

/* ---- ground truth ---- */
/* family: "gaussian", "student" or "smoothed_uniform". */
MIENF_API mienf_status mienf_oracle(const char* family, size_t dim_x, size_t dim_y, double target_mi,
                                    unsigned dof, size_t n_mc, uint64_t seed, double* mi, double* standard_error);
MIENF_API mienf_status mienf_student_correction(double dof, size_t dim_x, size_t dim_y, double* out);
MIENF_API mienf_status mienf_smoothed_uniform_mi(double eps, double* out);
MIENF_API mienf_status mienf_smoothed_uniform_eps(double mi, double* out);

#ifdef __cplusplus
}
#endif

#endif /* MIENF_MIENF_H_ */
