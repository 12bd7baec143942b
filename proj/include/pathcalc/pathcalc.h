/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#ifndef PATHCALC_PATHCALC_H
#define PATHCALC_PATHCALC_H

#include <stddef.h>
#include <stdint.h>

#if defined(PATHCALC_BUILDING_LIBRARY)
#define PC_API __attribute__((visibility("default")))
#else
#define PC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/*
 * Every function returns a pc_status. On failure the message for the calling
 * thread is available from pc_last_error() until the next failing call.
 * Handles are opaque, immutable once created and must be released with the
 * matching *_free function (NULL is accepted and ignored).
 */
typedef enum pc_status {
  PC_OK = 0,
  PC_ERR_DOMAIN = 1,
  PC_ERR_PRECISION = 2,
  PC_ERR_CONFIG = 3,
  PC_ERR_EVALUATION = 4,
  PC_ERR_CONSISTENCY = 5,
  PC_ERR_IO = 6,
  PC_ERR_INVALID_ARGUMENT = 7,
  PC_ERR_INTERNAL = 8
} pc_status;

typedef struct pc_path pc_path;
typedef struct pc_ground_truth pc_ground_truth;
typedef struct pc_functional pc_functional;
typedef struct pc_qv_table pc_qv_table;
typedef struct pc_report pc_report;
typedef struct pc_derivative_table pc_derivative_table;

typedef enum pc_scheme { PC_SCHEME_DYADIC = 0, PC_SCHEME_JUMP = 1, PC_SCHEME_STOPPING = 2 } pc_scheme;
typedef enum pc_mode { PC_MODE_CONTINUOUS = 0, PC_MODE_CADLAG = 1, PC_MODE_RIGHT = 2 } pc_mode;
typedef enum pc_gen_kind {
  PC_GEN_BROWNIAN = 0,
  PC_GEN_COMPOUND_POISSON = 1,
  PC_GEN_JUMP_DIFFUSION = 2,
  PC_GEN_ZERO_QV = 3,
  PC_GEN_DETERMINISTIC = 4
} pc_gen_kind;
typedef enum pc_shape { PC_SHAPE_LINEAR = 0, PC_SHAPE_STEP = 1, PC_SHAPE_SINE = 2 } pc_shape;

PC_API const char* pc_version(void);
PC_API const char* pc_last_error(void);
PC_API const char* pc_status_name(pc_status status);

/* ---- generation ---------------------------------------------------------- */

typedef struct pc_gen_spec {
  pc_gen_kind kind;
  double horizon;
  int depth;
  uint64_t seed;
  size_t dim;
  double sigma;
  double rate;
  double jump_low;
  double jump_high;
  double alpha;
  pc_shape shape;
  double amplitude;
  double jump_time;
} pc_gen_spec;

/* Fills the defaults: brownian, T = 1, depth 16, seed 42, sigma 1, no jumps. */
PC_API void pc_gen_spec_init(pc_gen_spec* spec);
PC_API pc_status pc_generate(const pc_gen_spec* spec, pc_path** path, pc_ground_truth** truth);
/* x + b for a continuous b; truth_x may be NULL. */
PC_API pc_status pc_dirichlet_sum(const pc_path* x, const pc_path* b, const pc_ground_truth* truth_x,
                                  pc_path** sum, pc_ground_truth** truth);

/* ---- paths --------------------------------------------------------------- */

/* values: (last + 1) * dim row-major samples; jump_index/jump_delta: n_jumps
 * grid indices and n_jumps * dim deltas (may be NULL when n_jumps == 0). */
PC_API pc_status pc_path_from_samples(double horizon, int depth, size_t dim, const double* values, size_t last,
                                      const size_t* jump_index, const double* jump_delta, size_t n_jumps,
                                      pc_path** out);
/* Constant path of dimension `dim` on the grid and horizon of `like`. */
PC_API pc_status pc_path_constant_like(const pc_path* like, size_t dim, const double* value, pc_path** out);
PC_API pc_status pc_path_read_csv(const char* file, pc_path** out);
/* comments: n_comments lines written as "# line" ahead of the data (may be NULL). */
PC_API pc_status pc_path_write_csv(const pc_path* path, const char* file, const char* const* comments,
                                   size_t n_comments);
PC_API void pc_path_free(pc_path* path);

PC_API size_t pc_path_dim(const pc_path* path);
PC_API size_t pc_path_last_index(const pc_path* path);
PC_API double pc_path_horizon(const pc_path* path);
PC_API int pc_path_depth(const pc_path* path);
PC_API double pc_path_grid_horizon(const pc_path* path);
PC_API size_t pc_path_jump_count(const pc_path* path);
/* Copies component values at grid index i into out[dim]. */
PC_API pc_status pc_path_sample(const pc_path* path, size_t index, double* out);
PC_API pc_status pc_path_eval(const pc_path* path, double t, double* out);
PC_API pc_status pc_path_left_limit(const pc_path* path, double t, double* out);

/* ---- ground truth -------------------------------------------------------- */

PC_API pc_status pc_truth_write_csv(const pc_ground_truth* truth, const pc_path* path, const char* file,
                                    const char* const* comments, size_t n_comments);
PC_API pc_status pc_truth_read_csv(const char* file, pc_ground_truth** out);
PC_API void pc_truth_free(pc_ground_truth* truth);
PC_API double pc_truth_qv_rate(const pc_ground_truth* truth);
PC_API size_t pc_truth_jump_count(const pc_ground_truth* truth);

/* ---- functionals --------------------------------------------------------- */

/* spec: "name[:key=value,...]", e.g. "cylinder:f=t*x^2". */
PC_API pc_status pc_functional_create(const char* spec, size_t dim, pc_functional** out);
PC_API void pc_functional_free(pc_functional* f);
PC_API const char* pc_functional_name(const pc_functional* f);
/* v may be NULL (v identically zero). Evaluates F_t on the pair restricted to [0, t]. */
PC_API pc_status pc_functional_evaluate(const pc_functional* f, const pc_path* x, const pc_path* v, double t,
                                        double* out);

/* ---- derivatives --------------------------------------------------------- */

typedef struct pc_fd_scheme {
  double vertical_eps;
  double hessian_eps;
  int horizontal_steps;
} pc_fd_scheme;

PC_API void pc_fd_scheme_init(pc_fd_scheme* scheme);
/* Rows of (kind, row, col, analytic, fd, abs_err, rel_err); kind is 0
 * horizontal, 1 gradient, 2 hessian; analytic is NaN when absent. */
PC_API pc_status pc_derivative_check(const pc_functional* f, const pc_path* x, const pc_path* v, double t,
                                     const pc_fd_scheme* scheme, pc_derivative_table** out);
PC_API size_t pc_derivative_table_rows(const pc_derivative_table* table);
PC_API pc_status pc_derivative_table_row(const pc_derivative_table* table, size_t row, int* kind, size_t* i,
                                         size_t* j, double* analytic, double* fd, double* abs_err, double* rel_err);
PC_API void pc_derivative_table_free(pc_derivative_table* table);

/* ---- quadratic variation ------------------------------------------------- */

/* One block of rows per level in [level_lo, level_hi] for one component. v
 * (may be NULL) only matters for the jump and stopping schemes. */
PC_API pc_status pc_qv_compute(const pc_path* x, const pc_path* v, int level_lo, int level_hi, pc_scheme scheme,
                               size_t component, pc_qv_table** out);
PC_API size_t pc_qv_table_rows(const pc_qv_table* table);
PC_API pc_status pc_qv_table_row(const pc_qv_table* table, size_t row, int* level, double* t, double* curve,
                                 double* continuous, double* atomic);
/* curve at T of the given level, or NaN when the level is not in the table. */
PC_API double pc_qv_table_total(const pc_qv_table* table, int level);
PC_API void pc_qv_table_free(pc_qv_table* table);

/* ---- Foellmer sums and change-of-variable reports ------------------------ */

PC_API pc_status pc_follmer_sum(const pc_functional* f, const pc_path* x, const pc_path* v, int level,
                                pc_scheme scheme, pc_mode mode, int use_fd, double* out);
PC_API pc_status pc_cov_report(const pc_functional* f, const pc_path* x, const pc_path* v, int level_lo,
                               int level_hi, pc_scheme scheme, pc_mode mode, int use_fd, pc_report** out);
PC_API size_t pc_report_rows(const pc_report* report);
/* error (may be NULL) receives NULL on success or the level's failure message,
 * valid while the report lives. */
PC_API pc_status pc_report_row(const pc_report* report, size_t row, int* level, double* lhs, double* horizontal,
                               double* trace, double* follmer, double* jumps, double* residual,
                               const char** error);
PC_API void pc_report_free(pc_report* report);

#ifdef __cplusplus
}
#endif

#endif /* PATHCALC_PATHCALC_H */
