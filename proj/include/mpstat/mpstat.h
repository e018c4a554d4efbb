// Copyright 2026 The mpstat Authors
// SPDX-License-Identifier: Apache-2.0
#ifndef MPSTAT_MPSTAT_H_
#define MPSTAT_MPSTAT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MPSTAT_BUILDING)
#    define MPS_API __declspec(dllexport)
#  else
#    define MPS_API __declspec(dllimport)
#  endif
#else
#  define MPS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mps_status {
  MPS_OK = 0,
  MPS_ERR_INVALID_ARGUMENT = 1,
  MPS_ERR_IO = 2,
  MPS_ERR_PARSE = 3,
  MPS_ERR_NUMERIC = 4,
  MPS_ERR_CONFIG = 5,
  MPS_ERR_INTERNAL = 6,
} mps_status;

typedef enum mps_statistic {
  MPS_STAT_F = 0,
  MPS_STAT_D = 1,
  MPS_STAT_J = 2,
  MPS_STAT_K = 3,
} mps_statistic;

typedef enum mps_edge {
  MPS_EDGE_TORUS = 0,
  MPS_EDGE_LOCAL = 1,
} mps_edge;

typedef struct mps_window {
  double xmin, xmax, ymin, ymax;
} mps_window;

typedef struct mps_pattern mps_pattern;
typedef struct mps_model mps_model;
typedef struct mps_estimate mps_estimate;
typedef struct mps_envelope mps_envelope;

/* Message of the last failed call on this thread; never NULL. */
MPS_API const char* mps_last_error(void);
MPS_API const char* mps_version(void);

/* Patterns. marks[i] indexes labels; duplicate locations are an error unless
   keep_first is non-zero. weights may be NULL (counting measure). */
MPS_API mps_status mps_pattern_create(mps_window window, const char* const* labels,
                                      const double* weights, size_t n_labels,
                                      const double* xy, const uint32_t* marks, size_t n,
                                      int keep_first, mps_pattern** out);
MPS_API mps_status mps_pattern_read_csv(const char* path, mps_window window,
                                        mps_pattern** out);
MPS_API mps_status mps_pattern_write_csv(const mps_pattern* p, const char* path);
MPS_API size_t mps_pattern_size(const mps_pattern* p);
MPS_API size_t mps_pattern_mark_count(const mps_pattern* p);
MPS_API mps_status mps_pattern_point(const mps_pattern* p, size_t i, double* x, double* y,
                                     uint32_t* mark);
MPS_API void mps_pattern_destroy(mps_pattern* p);

/* Intensity models. Handles are reference counted internally, so a model may
   be destroyed after being used to build another one. */
MPS_API mps_status mps_model_constant(mps_window domain, const double* values, size_t n_marks,
                                      mps_model** out);
/* coef holds (a, bx, by) per mark. */
MPS_API mps_status mps_model_linear(mps_window domain, const double* coef, size_t n_marks,
                                    mps_model** out);
MPS_API mps_status mps_model_kernel(mps_window window, const double* xy, size_t n,
                                    double sigma, mps_edge edge, int leave_one_out,
                                    mps_model** out);
MPS_API mps_status mps_model_per_mark(const mps_model* const* components, size_t n,
                                      mps_model** out);
MPS_API mps_status mps_model_scaled(const mps_model* base, double scale, mps_model** out);
MPS_API mps_status mps_model_evaluate(const mps_model* m, double x, double y, uint32_t mark,
                                      double* value);
MPS_API mps_status mps_model_lower_bound(const mps_model* m, const mps_pattern* p,
                                         const uint32_t* marks, size_t n_marks, int grid_n,
                                         double* value);
MPS_API mps_status mps_fit_scale(const mps_model* base, const mps_pattern* p, int raster_n,
                                 double* scale);
MPS_API void mps_model_destroy(mps_model* m);

/* Summary statistics. Undefined entries are reported as NaN with defined=0. */
MPS_API mps_status mps_summarize(const mps_pattern* p, const mps_model* m,
                                 const uint32_t* from, size_t n_from, const uint32_t* to,
                                 size_t n_to, const double* r, size_t n_r, int probe_n,
                                 mps_estimate** out);
MPS_API size_t mps_estimate_size(const mps_estimate* e);
MPS_API double mps_estimate_lambda_bar(const mps_estimate* e);
MPS_API mps_status mps_estimate_value(const mps_estimate* e, mps_statistic s, size_t i,
                                      double* value, int* defined);
MPS_API mps_status mps_estimate_write_csv(const mps_estimate* e, const char* path);
MPS_API void mps_estimate_destroy(mps_estimate* e);

/* Monte Carlo envelope tests. */
typedef struct mps_test_options {
  int replicates;
  int rank;
  uint64_t seed;
  unsigned threads;
  int probe_n;
} mps_test_options;

MPS_API mps_test_options mps_test_options_default(void);
MPS_API mps_status mps_test_random_labelling(const mps_pattern* p, const mps_model* ground,
                                             const uint32_t* from, size_t n_from,
                                             mps_statistic s, const double* r, size_t n_r,
                                             const mps_test_options* opts,
                                             mps_envelope** out);
MPS_API mps_status mps_test_independence(const mps_pattern* p, const mps_model* m,
                                         const uint32_t* from, size_t n_from,
                                         const uint32_t* to, size_t n_to, mps_statistic s,
                                         const double* r, size_t n_r,
                                         const mps_test_options* opts, mps_envelope** out);
MPS_API size_t mps_envelope_size(const mps_envelope* e);
/* Any of observed/lo/hi may be NULL. Missing values are NaN. */
MPS_API mps_status mps_envelope_row(const mps_envelope* e, size_t i, double* r,
                                    double* observed, double* lo, double* hi);
MPS_API int mps_envelope_rejects(const mps_envelope* e, size_t i);
MPS_API mps_status mps_envelope_write_csv(const mps_envelope* e, const char* path);
MPS_API void mps_envelope_destroy(mps_envelope* e);

/* Runs a CLI command on a JSON configuration. On return *report_json (if not
   NULL) holds a JSON document with outputs, warnings and metadata, or the
   error message; release it with mps_string_free. */
MPS_API mps_status mps_run_command(const char* command, const char* config_json,
                                   char** report_json);
MPS_API void mps_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif  // MPSTAT_MPSTAT_H_
