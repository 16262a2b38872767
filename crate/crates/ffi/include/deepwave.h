#ifndef DEEPWAVE_H
#define DEEPWAVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum {
  DW_STATUS_OK = 0,
  DW_STATUS_NULL_POINTER = 1,
  DW_STATUS_INVALID_ARGUMENT = 2,
  DW_STATUS_CONFIG = 3,
  DW_STATUS_BLOW_UP = 4,
  DW_STATUS_IO = 5,
  DW_STATUS_FORMAT = 6,
  DW_STATUS_PANIC = 7,
} DwStatus;

/**
 * Envelope equations.
 */
typedef enum {
  DW_MODEL_HAMILTONIAN_DYSTHE = 0,
  DW_MODEL_CLASSICAL_DYSTHE = 1,
  DW_MODEL_NLS = 2,
  DW_MODEL_EXACT_DISPERSION = 3,
} DwModel;

/**
 * Envelope solver and its current state.
 */
typedef struct DwEnvelope DwEnvelope;

/**
 * Full-equation solver and its current state.
 */
typedef struct DwFull DwFull;

/**
 * Periodic grid of `nx * ny` points on `[0, lx) x [0, ly)`.
 */
typedef struct {
  size_t nx;
  size_t ny;
  double lx;
  double ly;
} DwGrid;

/**
 * Perturbed Stokes envelope `b0 (1 + perturbation cos(lambda x) cos(mu y))`
 * and its integration settings.
 */
typedef struct {
  DwGrid grid;
  DwModel model;
  double k0;
  double g;
  double dt;
  double b0;
  double lambda;
  double mu;
  double perturbation;
} DwEnvelopeParams;

typedef struct {
  double b0;
  double k0;
  double g;
  double epsilon;
  double lambda;
  double mu;
} DwStabilityQuery;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the calling thread's last error message.
 */
size_t dw_last_error_length(void);

/**
 * Copy the last error message, NUL terminated and truncated to fit, into
 * `buf`. Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t dw_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dw_version(void);

/**
 * Create an envelope solver holding the perturbed Stokes initial data. For
 * the classical model the data is converted to the surface amplitude.
 *
 * # Safety
 * `params` must point to a valid struct and `out` to writable storage.
 */
DwStatus dw_envelope_new(const DwEnvelopeParams *params, DwEnvelope **out);

/**
 * # Safety
 * `h` must be null or a handle from [`dw_envelope_new`] not yet freed.
 */
void dw_envelope_free(DwEnvelope *h);

/**
 * Advance `n` steps.
 *
 * # Safety
 * `h` must be a live envelope handle.
 */
DwStatus dw_envelope_step(DwEnvelope *h, size_t n);

/**
 * # Safety
 * `h` must be a live envelope handle and `t` writable.
 */
DwStatus dw_envelope_time(const DwEnvelope *h, double *t);

/**
 * Write `[H, M, Ix, Iy]` of the current state to `out`.
 *
 * # Safety
 * `h` must be a live envelope handle and `out` must hold 4 doubles.
 */
DwStatus dw_envelope_invariants(const DwEnvelope *h, double *out);

/**
 * Copy the envelope, row-major `[ix][iy]`, into `re` and `im`.
 *
 * # Safety
 * `re` and `im` must each hold `len >= nx * ny` doubles.
 */
DwStatus dw_envelope_get(const DwEnvelope *h, double *re, double *im, size_t len);

/**
 * Reconstructed surface elevation and potential trace of the current state.
 *
 * # Safety
 * `eta` and `xi` must each hold `len >= nx * ny` doubles.
 */
DwStatus dw_envelope_surface(const DwEnvelope *h, double *eta, double *xi, size_t len);

/**
 * Create a full solver with a flat surface at rest.
 *
 * # Safety
 * `grid` must point to a valid struct and `out` to writable storage.
 */
DwStatus dw_full_new(const DwGrid *grid_desc, size_t dno_order, double g, double dt, DwFull **out);

/**
 * # Safety
 * `h` must be null or a handle from [`dw_full_new`] not yet freed.
 */
void dw_full_free(DwFull *h);

/**
 * Replace the state with `(eta, xi)` at time `t`.
 *
 * # Safety
 * `eta` and `xi` must each hold exactly `len = nx * ny` doubles.
 */
DwStatus dw_full_set_state(DwFull *h, const double *eta, const double *xi, size_t len, double t);

/**
 * Initialize the state from the surface reconstructed from an envelope.
 *
 * # Safety
 * Both handles must be live.
 */
DwStatus dw_full_set_from_envelope(DwFull *h, const DwEnvelope *env);

/**
 * # Safety
 * `h` must be a live full-solver handle.
 */
DwStatus dw_full_step(DwFull *h, size_t n);

/**
 * # Safety
 * `h` must be a live full-solver handle and `t` writable.
 */
DwStatus dw_full_time(const DwFull *h, double *t);

/**
 * # Safety
 * `h` must be a live full-solver handle and `out` writable.
 */
DwStatus dw_full_hamiltonian(const DwFull *h, double *out);

/**
 * Copy the state, row-major `[ix][iy]`, into `eta` and `xi`.
 *
 * # Safety
 * `eta` and `xi` must each hold `len >= nx * ny` doubles.
 */
DwStatus dw_full_get(const DwFull *h, double *eta, double *xi, size_t len);

/**
 * Writes 1 to `out` when the perturbation is modulationally unstable, else 0.
 *
 * # Safety
 * `q` must point to a valid query and `out` be writable.
 */
DwStatus dw_bf_condition(const DwStabilityQuery *q, int32_t *out);

/**
 * Largest real growth exponent of the linearized envelope model.
 *
 * # Safety
 * `q` must point to a valid query and `out` be writable.
 */
DwStatus dw_growth_rate(const DwStabilityQuery *q, DwModel model, double *out);

/**
 * Upper edge of the unstable band along `mu = 0`.
 *
 * # Safety
 * `q` must point to a valid query and `out` be writable.
 */
DwStatus dw_band_edge(const DwStabilityQuery *q, double *out);

/**
 * `d123` for the wavevectors `k = [k1x, k1y, k2x, k2y, k3x, k3y]`.
 *
 * # Safety
 * `k` must hold 6 doubles and `out` be writable.
 */
DwStatus dw_denom_d123(const double *k, double g, double *out);

/**
 * Quartic coefficient `T1` for `k = [k1x, k1y, ..., k4x, k4y]` with
 * `k1 + k2 + k3 + k4 = 0`.
 *
 * # Safety
 * `k` must hold 8 doubles and `out` be writable.
 */
DwStatus dw_coeff_t1(const double *k, double g, double *out);

/**
 * Run a JSON configuration, writing its outputs into `out_dir` (or the
 * configuration's own directory when `out_dir` is null).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_dir` null or NUL-terminated.
 */
DwStatus dw_run_json(const char *json, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEEPWAVE_H */
