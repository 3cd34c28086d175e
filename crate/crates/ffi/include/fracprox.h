#ifndef FRACPROX_H
#define FRACPROX_H

/* Generated by cbindgen from fracprox-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible entry point.
typedef enum FpStatus {
  FP_STATUS_OK = 0,
  // A required pointer argument was null.
  FP_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  FP_STATUS_UTF8 = 2,
  // Malformed input: config, parameters, dimensions, safeguards.
  FP_STATUS_CONFIG = 3,
  // A standing hypothesis on f or g failed.
  FP_STATUS_HYPOTHESIS = 4,
  // The operation is outside the supported envelope (dimension, set).
  FP_STATUS_UNSUPPORTED = 5,
  // Verification ran and at least one check failed.
  FP_STATUS_VERIFY = 6,
  // Internal failure (panic caught at the boundary).
  FP_STATUS_INTERNAL = 7,
} FpStatus;

// Why a run stopped.
typedef enum FpTermination {
  FP_TERMINATION_THETA_TOL_REACHED = 0,
  FP_TERMINATION_STEP_TOL_REACHED = 1,
  FP_TERMINATION_MAX_ITER = 2,
  FP_TERMINATION_OPTIMAL_VALUE_ZERO = 3,
  FP_TERMINATION_DIVERGED = 4,
} FpTermination;

// Opaque problem handle.
typedef struct FpInstance FpInstance;

// Opaque trace handle.
typedef struct FpTrace FpTrace;

// One iteration record (the iterate itself is read via `fracprox_trace_x`).
typedef struct FpRecord {
  uint64_t k;
  double theta;
  double eta;
  double f_val;
  double g_val;
  double step_norm;
  double residual_norm;
} FpRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *fracprox_version(void);

// Description of the most recent failure on this thread, or null when the
// last call succeeded. Free with `fracprox_string_free`.
char *fracprox_last_error_message(void);

// Releases a string allocated by this library. Null is a no-op.
//
// # Safety
// `s` must have been returned by this library and not freed before.
void fracprox_string_free(char *s);

// Builds a named catalog problem (`P1` .. `P4`).
//
// # Safety
// `id` must be a valid NUL-terminated string and `out` a valid pointer.
enum FpStatus fracprox_instance_catalog(const char *id, struct FpInstance **out);

// Builds a problem from a full run-config JSON document (the same format
// the CLI consumes); only the problem/x0 sections are used.
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid pointer.
enum FpStatus fracprox_instance_from_config_json(const char *json, struct FpInstance **out);

// Clone of the instance with a different starting point.
//
// # Safety
// `inst` must be a live instance handle, `coords` must point at `len`
// doubles, `out` must be valid.
enum FpStatus fracprox_instance_with_x0(const struct FpInstance *inst,
                                        const double *coords,
                                        uintptr_t len,
                                        struct FpInstance **out);

// Problem dimension; zero for a null handle.
//
// # Safety
// `inst` must be null or a live instance handle.
uintptr_t fracprox_instance_dim(const struct FpInstance *inst);

// Samples the standing hypotheses; `FP_STATUS_OK` when every check passed,
// `FP_STATUS_HYPOTHESIS` otherwise (details in the last error message).
//
// # Safety
// `inst` must be a live instance handle.
enum FpStatus fracprox_instance_validate(const struct FpInstance *inst, uint64_t seed);

// Releases an instance handle. Null is a no-op.
//
// # Safety
// `inst` must be null or a live instance handle; it is consumed.
void fracprox_instance_free(struct FpInstance *inst);

// Adaptive-step solver for concave denominators.
//
// # Safety
// `inst` must be a live instance handle and `out` a valid pointer.
enum FpStatus fracprox_solve_concave(const struct FpInstance *inst,
                                     uint64_t max_iter,
                                     double tol_theta,
                                     double tol_step,
                                     double theta_floor,
                                     struct FpTrace **out);

// Step-policy solver for convex denominators. `ratio = 1` is a constant
// step, `ratio < 1` a geometric schedule; `safeguard != 0` enforces
// `eta_1 * theta_1 < 1/L` at start.
//
// # Safety
// `inst` must be a live instance handle and `out` a valid pointer.
enum FpStatus fracprox_solve_convex(const struct FpInstance *inst,
                                    double eta1,
                                    double ratio,
                                    int32_t safeguard,
                                    uint64_t max_iter,
                                    double tol_theta,
                                    double tol_step,
                                    struct FpTrace **out);

// Parametric baseline with a nested proximal-gradient subproblem solve.
//
// # Safety
// `inst` must be a live instance handle and `out` a valid pointer.
enum FpStatus fracprox_solve_dinkelbach(const struct FpInstance *inst,
                                        uint64_t max_iter,
                                        double tol_theta,
                                        uint64_t inner_max_iter,
                                        double inner_tol,
                                        struct FpTrace **out);

// Number of records in the trace; zero for a null handle.
//
// # Safety
// `trace` must be null or a live trace handle.
uintptr_t fracprox_trace_len(const struct FpTrace *trace);

// Termination reason.
//
// # Safety
// `trace` must be a live trace handle and `out` a valid pointer.
enum FpStatus fracprox_trace_termination(const struct FpTrace *trace, enum FpTermination *out);

// Scalar fields of record `idx` (0-based).
//
// # Safety
// `trace` must be a live trace handle and `out` a valid pointer.
enum FpStatus fracprox_trace_record(const struct FpTrace *trace,
                                    uintptr_t idx,
                                    struct FpRecord *out);

// Copies the iterate of record `idx` into `buf` (which must hold exactly
// the problem dimension).
//
// # Safety
// `trace` must be a live trace handle and `buf` must point at `len` doubles.
enum FpStatus fracprox_trace_x(const struct FpTrace *trace,
                               uintptr_t idx,
                               double *buf,
                               uintptr_t len);

// Ratio at the final iterate.
//
// # Safety
// `trace` must be a live trace handle and `out` a valid pointer.
enum FpStatus fracprox_trace_theta_final(const struct FpTrace *trace, double *out);

// The trace serialized to the CSV contract. Free with
// `fracprox_string_free`.
//
// # Safety
// `trace` must be a live trace handle and `out` a valid pointer.
enum FpStatus fracprox_trace_csv(const struct FpTrace *trace, char **out);

// Releases a trace handle. Null is a no-op.
//
// # Safety
// `trace` must be null or a live trace handle; it is consumed.
void fracprox_trace_free(struct FpTrace *trace);

// Exhaustive grid search over the feasible box: optimal ratio, certified
// discretization gap, and the minimizer written into `x_buf`.
//
// # Safety
// `inst` must be a live instance handle; `out_theta`, `out_gap` valid
// pointers; `x_buf` must point at `x_len` doubles.
enum FpStatus fracprox_oracle_grid_minimize(const struct FpInstance *inst,
                                            uintptr_t n_points_per_dim,
                                            double *out_theta,
                                            double *out_gap,
                                            double *x_buf,
                                            uintptr_t x_len);

// Replays every applicable check on the trace and returns the JSON report
// through `report_out` (free with `fracprox_string_free`). Grid-backed
// checks run only when `oracle_points > 0`. Returns `FP_STATUS_OK` when all
// checks passed and `FP_STATUS_VERIFY` when at least one failed; the report
// is written in both cases.
//
// # Safety
// `inst` and `trace` must be live handles; `report_out` may be null when
// the caller only wants the status.
enum FpStatus fracprox_verify(const struct FpInstance *inst,
                              const struct FpTrace *trace,
                              uintptr_t oracle_points,
                              uint64_t seed,
                              char **report_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACPROX_H */
