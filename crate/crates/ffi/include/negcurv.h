#ifndef NEGCURV_H
#define NEGCURV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>
#include <stddef.h>

/**
 * Result code of a fallible call.
 */
typedef enum NegcurvCode {
  NEGCURV_CODE_OK = 0,
  NEGCURV_CODE_NULL_POINTER = 1,
  NEGCURV_CODE_INVALID_UTF8 = 2,
  NEGCURV_CODE_INVALID_ARGUMENT = 3,
  NEGCURV_CODE_UNKNOWN_PROBLEM = 4,
  NEGCURV_CODE_INVALID_CONFIG = 5,
  NEGCURV_CODE_DIMENSION_MISMATCH = 6,
  NEGCURV_CODE_SOLVER_ERROR = 7,
  NEGCURV_CODE_PANIC = 8,
} NegcurvCode;

/**
 * Termination status of a run.
 */
typedef enum NegcurvStatus {
  NEGCURV_STATUS_FIRST_ORDER = 0,
  NEGCURV_STATUS_SECOND_ORDER = 1,
  NEGCURV_STATUS_MAX_ITER = 2,
  NEGCURV_STATUS_NUMERIC_FAILURE = 3,
} NegcurvStatus;

/**
 * Solver parameters.
 */
typedef struct NegcurvConfig NegcurvConfig;

/**
 * A test problem with its starting point.
 */
typedef struct NegcurvProblem NegcurvProblem;

/**
 * Outcome of a solve.
 */
typedef struct NegcurvRun NegcurvRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *negcurv_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *negcurv_last_error(void);

/**
 * Releases a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void negcurv_string_free(char *s);

/**
 * Looks up a registered problem by spec, `name` or `name:n`.
 *
 * # Safety
 * `spec` must be NUL-terminated; `out` must be writable.
 */
enum NegcurvCode negcurv_problem_lookup(const char *spec, struct NegcurvProblem **out);

/**
 * Dimension of the problem, 0 for NULL.
 *
 * # Safety
 * `problem` must be NULL or a live handle.
 */
size_t negcurv_problem_dim(const struct NegcurvProblem *problem);

/**
 * Replaces the starting point with `x[0..len]`; `len` must equal the dimension.
 *
 * # Safety
 * `x` must point to `len` readable doubles.
 */
enum NegcurvCode negcurv_problem_set_start(struct NegcurvProblem *problem,
                                           const double *x,
                                           size_t len);

/**
 * # Safety
 * `problem` must be NULL or a handle not yet freed.
 */
void negcurv_problem_free(struct NegcurvProblem *problem);

/**
 * Default configuration for `mode` (`an2c`, `an2e`, `soan2c`, `soan2e`, `ar2`).
 *
 * # Safety
 * `mode` must be NUL-terminated; `out` must be writable.
 */
enum NegcurvCode negcurv_config_new(const char *mode, struct NegcurvConfig **out);

/**
 * Configuration from a JSON object; missing fields take their defaults.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum NegcurvCode negcurv_config_from_json(const char *json, struct NegcurvConfig **out);

/**
 * Sets a numeric field by its JSON name (`eps1`, `sigma0`, `kappa_C`,
 * `max_iter`, `theta_sub`, ...). The configuration is left unchanged if the
 * result does not validate.
 *
 * # Safety
 * `config` must be a live handle; `key` must be NUL-terminated.
 */
enum NegcurvCode negcurv_config_set(struct NegcurvConfig *config, const char *key, double value);

/**
 * Configuration as JSON; release with [`negcurv_string_free`]. NULL on a NULL handle.
 *
 * # Safety
 * `config` must be NULL or a live handle.
 */
char *negcurv_config_to_json(const struct NegcurvConfig *config);

/**
 * # Safety
 * `config` must be NULL or a handle not yet freed.
 */
void negcurv_config_free(struct NegcurvConfig *config);

/**
 * Solves `problem` from its starting point. A run that stops at `max_iter`
 * or on numeric failure still returns `Ok` with a run handle; inspect it with
 * [`negcurv_run_status`].
 *
 * # Safety
 * `problem` and `config` must be live handles; `out` must be writable.
 */
enum NegcurvCode negcurv_solve(const struct NegcurvProblem *problem,
                               const struct NegcurvConfig *config,
                               struct NegcurvRun **out);

/**
 * # Safety
 * `run` must be a live handle.
 */
enum NegcurvStatus negcurv_run_status(const struct NegcurvRun *run);

/**
 * Iterations taken, 0 for NULL.
 *
 * # Safety
 * `run` must be NULL or a live handle.
 */
size_t negcurv_run_iterations(const struct NegcurvRun *run);

/**
 * Final objective value, NaN for NULL.
 *
 * # Safety
 * `run` must be NULL or a live handle.
 */
double negcurv_run_f_final(const struct NegcurvRun *run);

/**
 * Final gradient norm, NaN for NULL.
 *
 * # Safety
 * `run` must be NULL or a live handle.
 */
double negcurv_run_grad_norm(const struct NegcurvRun *run);

/**
 * Copies the final iterate into `x[0..len]`; `len` must equal the dimension.
 *
 * # Safety
 * `x` must point to `len` writable doubles.
 */
enum NegcurvCode negcurv_run_x_final(const struct NegcurvRun *run, double *x, size_t len);

/**
 * Full run record as JSON; release with [`negcurv_string_free`]. NULL on a NULL handle.
 *
 * # Safety
 * `run` must be NULL or a live handle.
 */
char *negcurv_run_to_json(const struct NegcurvRun *run);

/**
 * # Safety
 * `run` must be NULL or a handle not yet freed.
 */
void negcurv_run_free(struct NegcurvRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEGCURV_H */
