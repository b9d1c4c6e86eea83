#ifndef CHANHEAT_H
#define CHANHEAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum {
  CHQ_STATUS_OK = 0,
  CHQ_STATUS_NULL_POINTER = 1,
  CHQ_STATUS_INVALID_ARGUMENT = 2,
  CHQ_STATUS_CONFIG_ERROR = 3,
  CHQ_STATUS_ENGINE_ERROR = 4,
  CHQ_STATUS_NO_CONVERGENCE = 5,
  CHQ_STATUS_NEGATIVE_TEMPERATURE = 6,
  CHQ_STATUS_IO_ERROR = 7,
  CHQ_STATUS_PANIC = 8,
} ChqStatus;

/**
 * Engine selector for [`chq_evolve`].
 */
typedef enum {
  CHQ_ENGINE_FULL = 0,
  CHQ_ENGINE_CHANNEL = 1,
} ChqEngine;

/**
 * Model parameters.
 */
typedef struct ChqParams ChqParams;

/**
 * A sampled P_e(t) trace.
 */
typedef struct ChqTrace ChqTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *chq_last_error(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *chq_version(void);

/**
 * Thermalization defaults. Never null.
 */
ChqParams *chq_params_default(void);

/**
 * Parses the model parameters of a config document into `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
ChqStatus chq_params_from_config(const char *text, ChqParams **out);

/**
 * # Safety
 * `p` must come from this library and not be used afterwards. Null is ignored.
 */
void chq_params_free(ChqParams *p);

/**
 * Sets one parameter from its config key and a unit-suffixed value, e.g.
 * ("eta", "2.5 MHz"). The parameters are unchanged on failure.
 *
 * # Safety
 * `p` must be a live handle; `key` and `value` NUL-terminated strings.
 */
ChqStatus chq_params_set(ChqParams *p, const char *key, const char *value);

/**
 * Reads one parameter in internal units (rad/µs, µs, K).
 *
 * # Safety
 * `p` must be a live handle, `key` a NUL-terminated string, `out` valid.
 */
ChqStatus chq_params_get(const ChqParams *p, const char *key, double *out);

/**
 * Steady P_e of the full Lindblad model.
 *
 * # Safety
 * `p` must be a live handle and `p_e` valid.
 */
ChqStatus chq_steady_state_full(const ChqParams *p, double *p_e);

/**
 * Steady P_e of the channel model: closed-form inversion and the null
 * vector of the rate equations. Either output pointer may be null.
 *
 * # Safety
 * `p` must be a live handle; non-null outputs must be valid.
 */
ChqStatus chq_steady_state_channel(const ChqParams *p, double *formula, double *rates);

/**
 * Channel-state energies ε_k (rad/µs) in ascending order.
 *
 * # Safety
 * `p` must be a live handle and `out` point to 3 doubles.
 */
ChqStatus chq_channel_energies(const ChqParams *p, double *out);

/**
 * Channel rates Γ_kn (1/µs), row-major 3×3.
 *
 * # Safety
 * `p` must be a live handle and `out` point to 9 doubles.
 */
ChqStatus chq_channel_rates(const ChqParams *p, double *out);

/**
 * P_e(t) from |g,0> on `samples` evenly spaced times in [0, t_max] µs.
 * `tol` is the integrator tolerance of the full engine.
 *
 * # Safety
 * `p` must be a live handle and `out` valid.
 */
ChqStatus chq_evolve(const ChqParams *p,
                     ChqEngine engine_kind,
                     double t_max,
                     size_t samples,
                     double tol,
                     ChqTrace **out);

/**
 * Number of samples; 0 for null.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t chq_trace_len(const ChqTrace *t);

/**
 * Copies up to `len` samples into `times` and `p_e` (either may be null).
 *
 * # Safety
 * `t` must be a live handle; non-null buffers must hold `len` doubles.
 */
ChqStatus chq_trace_copy(const ChqTrace *t, double *times, double *p_e, size_t len);

/**
 * # Safety
 * `t` must come from this library and not be used afterwards. Null is ignored.
 */
void chq_trace_free(ChqTrace *t);

/**
 * Gibbs temperature (K) of a two-level population at qubit frequency
 * `omega_q` (rad/µs). Infinite at P_e = 1/2.
 *
 * # Safety
 * `kelvin` must be valid.
 */
ChqStatus chq_effective_temperature(double p_e, double omega_q, double *kelvin);

/**
 * Inverse of [`chq_effective_temperature`].
 *
 * # Safety
 * `p_e` must be valid.
 */
ChqStatus chq_population_from_temperature(double kelvin, double omega_q, double *p_e);

/**
 * Runs the scenario a config document selects and writes its files into
 * `out_dir`. `exit_code`, if non-null, receives the CLI exit code.
 *
 * # Safety
 * `config` and `out_dir` must be NUL-terminated strings.
 */
ChqStatus chq_run_scenario(const char *config, const char *out_dir, int *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHANHEAT_H */
