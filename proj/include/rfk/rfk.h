#ifndef RFK_H
#define RFK_H

/* C interface to the rfk library. Every fallible call returns an rfk_status;
 * on failure rfk_last_error_message() describes the error on the calling
 * thread. Strings returned through char** are owned by the caller and must be
 * released with rfk_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(RFK_BUILDING_LIBRARY)
#define RFK_API __attribute__((visibility("default")))
#else
#define RFK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rfk_status {
  RFK_OK = 0,
  RFK_INVALID_ARGUMENT = 1,
  RFK_INVALID_SIGNATURE = 2,
  RFK_SINGULAR_FIBER = 3,
  RFK_DOMAIN = 4,
  RFK_CONVERGENCE = 5,
  RFK_POLE = 6,
  RFK_DIRAC_STRING = 7,
  RFK_CHART_BOUNDARY = 8,
  RFK_DEGENERATE_METRIC = 9,
  RFK_NUMERIC_OVERFLOW = 10,
  RFK_FIT_DOMAIN = 11,
  RFK_PATH = 12,
  RFK_SCAN = 13,
  RFK_PARSE = 14,
  RFK_NOT_APPLICABLE = 15,
  RFK_INTERNAL = 99
} rfk_status;

/* Chart of the coordinates passed to the evaluation calls:
 * RFK_SOURCE_GH uses (theta, b, a1, a2), RFK_SOURCE_HITCHIN (Re z, Im z, Re y, Im y). */
typedef enum rfk_source { RFK_SOURCE_GH = 0, RFK_SOURCE_HITCHIN = 1 } rfk_source;

/* A run configuration: centers, mode, checks, sampling and tolerances. */
typedef struct rfk_config rfk_config;

RFK_API rfk_status rfk_config_parse(const char* json_text, rfk_config** out);
RFK_API rfk_status rfk_config_load(const char* path, rfk_config** out);
RFK_API void rfk_config_destroy(rfk_config* config);
RFK_API rfk_status rfk_config_to_json(const rfk_config* config, char** out);

/* mode is "ale", "alf" or "akl:J". */
RFK_API rfk_status rfk_config_set_mode(rfk_config* config, const char* mode);
RFK_API rfk_status rfk_config_set_seed(rfk_config* config, uint64_t seed);
RFK_API rfk_status rfk_config_add_check(rfk_config* config, const char* name);
/* Moves every center by eps in a seed-determined direction. */
RFK_API rfk_status rfk_config_perturb(rfk_config* config, double eps);
RFK_API rfk_status rfk_config_center_count(const rfk_config* config, int* out);

/* Row-major 4x4 metric components. */
RFK_API rfk_status rfk_metric(const rfk_config* config, rfk_source source,
                              const double coords[4], double g[16]);
RFK_API rfk_status rfk_curvature_norms(const rfk_config* config, rfk_source source,
                                       const double coords[4], double* riem_sq,
                                       double* ricci_norm);
/* Height b solving prod((b - b_i) + Delta_i) = |y|^2 at z. */
RFK_API rfk_status rfk_solve_b(const rfk_config* config, double z_re, double z_im,
                               double y_abs_sq, double* b, double* residual);

/* CSV of metric and curvature at count points (coords holds 4 * count values).
 * Points where evaluation fails are flagged in the last column. */
RFK_API rfk_status rfk_sample_points_csv(const rfk_config* config, rfk_source source,
                                         const double* coords, size_t count, char** csv);
/* Same, at count deterministic sample points of the configuration's shell. */
RFK_API rfk_status rfk_sample_grid_csv(const rfk_config* config, rfk_source source,
                                       int count, char** csv);

/* Full report. csv may be NULL. */
RFK_API rfk_status rfk_verify(const rfk_config* config, char** report_json, char** csv,
                              int* all_pass);
/* kind is "decay", "volume" or "all". */
RFK_API rfk_status rfk_fit(const rfk_config* config, const char* kind, char** result_json,
                           int* all_pass);

/* kind is "config", "report", "csv" or NULL to detect. Returns RFK_PARSE for
 * a malformed document; summary receives a one-line description either way. */
RFK_API rfk_status rfk_validate(const char* text, const char* kind, char** summary);

RFK_API void rfk_string_free(char* s);
RFK_API const char* rfk_status_name(rfk_status status);
RFK_API const char* rfk_last_error_message(void);
RFK_API const char* rfk_version(void);

#ifdef __cplusplus
}
#endif

#endif
