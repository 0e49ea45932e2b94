/* C interface to the skorohod library.
 *
 * Every function returns an skh_status; on failure the message is available
 * from skh_last_error() on the same thread until the next call. Handles are
 * opaque and owned by the caller, who releases them with the matching _free.
 */
#ifndef SKOROHOD_SKOROHOD_H
#define SKOROHOD_SKOROHOD_H

#include <stddef.h>
#include <stdint.h>

#if defined(SKH_BUILDING_LIBRARY)
#define SKH_API __attribute__((visibility("default")))
#else
#define SKH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum skh_status {
  SKH_OK = 0,
  SKH_ERR_DOMAIN = 1,
  SKH_ERR_CAPACITY = 2,
  SKH_ERR_PARSE = 3,
  SKH_ERR_CONSISTENCY = 4,
  SKH_ERR_UNSUPPORTED = 5,
  SKH_ERR_IO = 6,
  SKH_ERR_INVALID_ARGUMENT = 7,
  SKH_ERR_INTERNAL = 8
} skh_status;

typedef enum skh_quadrature { SKH_TRAPEZOID = 0, SKH_SIMPSON = 1 } skh_quadrature;

typedef struct skh_problem skh_problem;
typedef struct skh_report skh_report;
typedef struct skh_validation skh_validation;

SKH_API const char* skh_version(void);
SKH_API const char* skh_last_error(void);
SKH_API const char* skh_status_name(skh_status status);

/* Problems. `truncation` is the degree M used by truncated builtins (0 picks
 * the default). */
SKH_API size_t skh_builtin_count(void);
SKH_API const char* skh_builtin_name(size_t index);
SKH_API skh_status skh_problem_from_builtin(const char* name, int truncation, skh_problem** out);
SKH_API skh_status skh_problem_from_file(const char* path, int truncation, skh_problem** out);
SKH_API skh_status skh_problem_from_text(const char* text, int truncation, skh_problem** out);
SKH_API void skh_problem_free(skh_problem* problem);

typedef struct skh_problem_info {
  int slots;
  size_t terms;
  int max_degree;
  int truncated;            /* nonzero for truncated infinite expansions */
  double drift_tail_bound;  /* bound on int E[(L u - L u_M)^2] ds, 0 if exact */
  double constant_tail;     /* implied bound on |C(u) - C(u_M)| */
} skh_problem_info;

SKH_API skh_status skh_problem_describe(const skh_problem* problem, skh_problem_info* out);
/* Canonical problem document; release with skh_string_free. */
SKH_API skh_status skh_problem_serialize(const skh_problem* problem, char** out);
SKH_API void skh_string_free(char* s);
SKH_API int skh_problem_equal(const skh_problem* a, const skh_problem* b);

/* Analytics. */
SKH_API skh_status skh_constant(const skh_problem* problem, double* c, double* drift_energy);
SKH_API skh_status skh_analytic_fn2(const skh_problem* problem, int n, double* x1, double* x2);
SKH_API skh_status skh_analytic_en2(const skh_problem* problem, int n, double* en2);

/* Monte Carlo. */
typedef struct skh_mc_result {
  int64_t paths;
  double e2_hat;
  double e2_stderr;
  double e_hat;
  double e_stderr;
} skh_mc_result;

SKH_API skh_status skh_mc_error(const skh_problem* problem, int n, int64_t paths, uint64_t seed, int fine_factor,
                                int workers, skh_mc_result* out);

typedef struct skh_oracle_result {
  double rms_gap;
  double inner_noise;
  double excess;
  double excess_stderr;
  double z;
} skh_oracle_result;

SKH_API skh_status skh_nested_oracle(const skh_problem* problem, int n, int64_t outer, int64_t inner, uint64_t seed,
                                     int fine_factor, int workers, skh_oracle_result* out);

typedef struct skh_rate_config {
  const int* n_list;
  size_t n_count;
  int64_t paths;
  uint64_t seed;
  int fine_factor;
  skh_quadrature quadrature;
  int workers;
} skh_rate_config;

typedef struct skh_report_row {
  int n;
  int64_t paths;
  double e_hat;
  double e_stderr;
  double e2_hat;
  double e2_stderr;
  double n_times_e;
  double f_n;           /* NaN when not available */
  double slope_running; /* NaN for the first row or exact integrands */
} skh_report_row;

SKH_API skh_status skh_rate_study(const skh_problem* problem, const skh_rate_config* config, skh_report** out);
SKH_API size_t skh_report_row_count(const skh_report* report);
SKH_API skh_status skh_report_row_at(const skh_report* report, size_t index, skh_report_row* out);
/* C, fitted slope (NaN if not fitted) and whether a slope was fitted. */
SKH_API skh_status skh_report_summary(const skh_report* report, double* c, double* slope, int* slope_fitted);
SKH_API skh_status skh_report_csv(const skh_report* report, char** out);
SKH_API skh_status skh_report_write_csv(const skh_report* report, const char* path);
SKH_API void skh_report_free(skh_report* report);

/* Checks. */
typedef struct skh_exact_verdict {
  int constant_coefficients;
  int drift_vanishes;
  int mc_exact;
  double e4_hat;
  int agree;
} skh_exact_verdict;

SKH_API skh_status skh_exact_check(const skh_problem* problem, uint64_t seed, skh_exact_verdict* out);

enum { SKH_VALIDATE_CORRUPT_COV_LIN = 1 };

SKH_API skh_status skh_validate(uint64_t seed, unsigned flags, skh_validation** out);
SKH_API size_t skh_validation_group_count(const skh_validation* v);
SKH_API skh_status skh_validation_group(const skh_validation* v, size_t index, const char** name, int* passed,
                                        const char** detail);
SKH_API int skh_validation_passed(const skh_validation* v);
SKH_API void skh_validation_free(skh_validation* v);

#ifdef __cplusplus
}
#endif

#endif /* SKOROHOD_SKOROHOD_H */
