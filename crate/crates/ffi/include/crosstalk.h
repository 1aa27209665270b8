/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CROSSTALK_H
#define CROSSTALK_H

#include <stddef.h>
#include <stdint.h>

#define CT_OK 0

#define CT_NULL_POINTER 1

#define CT_INVALID_PARAMETER 2

#define CT_ENGINE_ERROR 3

#define CT_BUFFER_TOO_SMALL 5

#define CT_PANIC 6

#define CT_ENGINE_ANALYTIC 0

#define CT_ENGINE_BLOCH 1

#define CT_ENGINE_TIMEDOMAIN 2

#define CT_ENGINE_LAMBDA 3

#define CT_AXIS_PROBE 0

#define CT_AXIS_CONTROL 1

#define CT_AXIS_RABI 2

#define CT_AXIS_LOCKED 3

// Opaque parameter set.
typedef struct CtSystem CtSystem;

typedef struct {
  double re;
  double im;
} CtComplex;

// Model inputs in units of the excited-state decay rate.
typedef struct {
  double b_excited;
  double b_ground;
  double control_detuning;
  double probe_detuning;
  CtComplex control_rabi;
  double gamma1;
  double gamma2;
} CtParams;

// First-order response at one parameter point.
//
// `has_chi_plus` is 0 for the Lambda engine and `has_terms` is 0 for the
// timedomain engine; the corresponding fields are then zero.
typedef struct {
  double coordinate;
  CtComplex chi_minus;
  CtComplex chi_plus;
  int32_t has_chi_plus;
  int32_t has_terms;
  CtComplex term_coh_pp;
  CtComplex term_coh_mm;
  CtComplex term_pop;
  // Zeroth-order populations of e+, e-, g+, g-.
  double populations[4];
} CtResponse;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Fill `out_params` with the reference parameter set.
//
// # Safety
// `out_params` must be null or point to writable memory for one `CtParams`.
int32_t ct_params_default(CtParams *out_params);

// Validate `params` and allocate a handle in `*out_system`.
//
// # Safety
// `params` must be null or valid; `out_system` must be null or writable.
int32_t ct_system_new(const CtParams *params, CtSystem **out_system);

// Release a handle. Null is ignored.
//
// # Safety
// `system` must be null or a handle from `ct_system_new` not yet freed.
void ct_system_free(CtSystem *system);

// Replace both detunings; the handle is unchanged on failure.
//
// # Safety
// `system` must be null or a live handle.
int32_t ct_system_set_detunings(CtSystem *system, double probe, double control);

// # Safety
// `system` must be null or a live handle; `out_params` null or writable.
int32_t ct_system_params(const CtSystem *system, CtParams *out_params);

// Susceptibilities at the handle's parameters using `engine`
// (one of the `CT_ENGINE_*` constants).
//
// # Safety
// `system` must be null or a live handle; `out_response` null or writable.
int32_t ct_chi(const CtSystem *system, int32_t engine_code, CtResponse *out_response);

// Zeroth-order populations of e+, e-, g+, g- written to `out_populations[0..4]`.
//
// # Safety
// `system` must be null or a live handle; `out_populations` null or
// writable for four doubles.
int32_t ct_zeroth_populations(const CtSystem *system, double *out_populations);

// Zero of the dispersion on the `delta = Delta` line.
//
// # Safety
// `system` must be null or a live handle; `out_value` null or writable.
int32_t ct_delta_zero(const CtSystem *system, double *out_value);

// The three roots of the dispersion-zero cubic, as offsets `delta - Delta`.
//
// # Safety
// `system` must be null or a live handle; `out_roots` null or writable
// for three `CtComplex`.
int32_t ct_cardano_roots(const CtSystem *system, CtComplex *out_roots);

// Sweep `axis` over `points` evenly spaced values in `[lo, hi]`.
//
// Evaluated points are written to `buffer` in grid order and their count
// to `*out_written`. Points the engine cannot evaluate are skipped. If
// `capacity < points` nothing is computed, `*out_written` receives
// `points` and `CT_BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `system` must be null or a live handle; `buffer` must be writable for
// `capacity` elements; `out_written` null or writable.
int32_t ct_scan(const CtSystem *system,
                int32_t axis_code,
                double lo,
                double hi,
                uintptr_t points,
                int32_t engine_code,
                CtResponse *buffer,
                uintptr_t capacity,
                uintptr_t *out_written);

// Static description of a status code.
const char *ct_status_string(int32_t status);

// Copy the calling thread's last failure message into `buffer`
// (NUL-terminated, truncated to `capacity`). Returns the full message
// length excluding the terminator.
//
// # Safety
// `buffer` must be null or writable for `capacity` bytes.
uintptr_t ct_last_error(char *buffer, uintptr_t capacity);

// Library version as a static NUL-terminated string.
const char *ct_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CROSSTALK_H */
