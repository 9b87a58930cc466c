/* C interface to the fscil evaluation engine and simulator.
 *
 * Conventions: functions return FSCIL_OK or a status code; on failure the
 * thread-local message from fscil_last_error() describes the problem. Strings
 * returned through char** are heap-allocated and must be released with
 * fscil_string_free(); matrices with fscil_matrix_free().
 */
#ifndef FSCIL_H
#define FSCIL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define FSCIL_API __declspec(dllexport)
#else
#define FSCIL_API __attribute__((visibility("default")))
#endif

typedef enum fscil_status {
  FSCIL_OK = 0,
  FSCIL_ERR_PARSE = 1,      /* malformed input text */
  FSCIL_ERR_VALIDATION = 2, /* structurally valid but violates an invariant */
  FSCIL_ERR_ARGUMENT = 3,   /* bad argument (null pointer, unknown name, range) */
  FSCIL_ERR_NUMERIC = 4,    /* numeric failure (non-finite loss, non-PSD) */
  FSCIL_ERR_INTERNAL = 5
} fscil_status;

typedef struct fscil_matrix fscil_matrix;

FSCIL_API const char* fscil_version(void);

/* message for the most recent failure on this thread; never NULL */
FSCIL_API const char* fscil_last_error(void);

/* ----- accuracy matrices ----- */

/* format: "csv" or "json" */
FSCIL_API fscil_status fscil_matrix_parse(const char* text, const char* format,
                                          fscil_matrix** out);
FSCIL_API fscil_status fscil_matrix_emit(const fscil_matrix* m, const char* format,
                                         char** out_text);
FSCIL_API fscil_status fscil_matrix_layout(const fscil_matrix* m, int* n_tasks,
                                           int* base_classes, int* novel_classes);
/* 1-based session i and task j <= i */
FSCIL_API fscil_status fscil_matrix_at(const fscil_matrix* m, int i, int j, double* out);
FSCIL_API void fscil_matrix_free(fscil_matrix* m);

/* ----- corner-case oracles ----- */

/* case_name: "lazy", "greedy" or "greedy-nf" */
FSCIL_API fscil_status fscil_oracle(const char* case_name, double base_acc, int tasks,
                                    int base_classes, int novel_classes,
                                    fscil_matrix** out);

/* ----- metrics ----- */

/* grid_points <= 0 selects the default grid (round of the base/novel ratio) */
FSCIL_API fscil_status fscil_report_json(const fscil_matrix* m, int grid_points,
                                         char** out_json);
FSCIL_API fscil_status fscil_curve_csv(const fscil_matrix* m, int grid_points,
                                       char** out_csv);
/* metric: "aacc", "lacc", "tacc", "gacc", "hacc" or "novel"; alpha < 0 = unset */
FSCIL_API fscil_status fscil_metric(const fscil_matrix* m, const char* metric,
                                    double alpha, int grid_points, double* out);
/* ranking of named matrices by a metric, descending, ties by name */
FSCIL_API fscil_status fscil_compare_json(const fscil_matrix* const* matrices,
                                          const char* const* names, size_t count,
                                          const char* metric, double alpha,
                                          int grid_points, char** out_json);

/* ----- simulator ----- */

FSCIL_API fscil_status fscil_default_config_json(char** out_json);
/* runs baseline + FR training; returns a bundle with config, all matrices
 * (in the matrix JSON schema) and baseline/ensemble metric reports */
FSCIL_API fscil_status fscil_simulate_json(const char* config_json, char** out_json);
FSCIL_API fscil_status fscil_ablate_json(const char* config_json, int grid_points,
                                         char** out_json);

/* ----- gradient checks ----- */

FSCIL_API fscil_status fscil_gradcheck_json(uint64_t seed, int configs, int dim,
                                            char** out_json);

FSCIL_API void fscil_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FSCIL_H */
