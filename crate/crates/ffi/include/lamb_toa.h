/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef LAMB_TOA_H
#define LAMB_TOA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LtStatus {
  LT_STATUS_OK = 0,
  LT_STATUS_NULL_POINTER = 1,
  LT_STATUS_INVALID_ARGUMENT = 2,
  LT_STATUS_INVALID_WAVEFORM = 3,
  LT_STATUS_BRANCH_LOST = 4,
  LT_STATUS_EMPTY_RANGE = 5,
  LT_STATUS_OUT_OF_RANGE = 6,
  LT_STATUS_WINDOW_TOO_LONG = 7,
  LT_STATUS_ZERO_SIGNAL = 8,
  LT_STATUS_BAND_NOT_COVERED = 9,
  LT_STATUS_INCONSISTENT_CHANNELS = 10,
  LT_STATUS_PANIC = 99,
} LtStatus;

typedef enum LtMode {
  LT_MODE_S0 = 0,
  LT_MODE_A0 = 1,
  LT_MODE_S1 = 2,
  LT_MODE_A1 = 3,
} LtMode;

typedef enum LtAicVariant {
  LT_AIC_VARIANT_GLOBAL_MIN = 0,
  LT_AIC_VARIANT_LOCAL_MIN = 1,
} LtAicVariant;

/**
 * Opaque traced dispersion branch.
 */
typedef struct LtCurve LtCurve;

/**
 * Opaque uniformly sampled signal.
 */
typedef struct LtWaveform LtWaveform;

/**
 * Isotropic plate: SI units, `half_thickness` in metres.
 */
typedef struct LtMaterial {
  double youngs_modulus;
  double poisson_ratio;
  double density;
  double half_thickness;
} LtMaterial;

typedef struct LtBulkSpeeds {
  double pressure;
  double shear;
} LtBulkSpeeds;

typedef struct LtDispersionSample {
  /**
   * Frequency times half-thickness (Hz·m).
   */
  double fd;
  double k;
  double c_phase;
  double c_group;
} LtDispersionSample;

/**
 * Result of a picker. `found` is 0 when no arrival was detected.
 */
typedef struct LtEstimate {
  uint8_t found;
  size_t index;
  double time;
} LtEstimate;

typedef struct LtAicParams {
  double r_a;
  double t_am;
  double t_first_lb;
  double t_fb;
  double t_fa;
} LtAicParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 *
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *lt_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lt_version(void);

/**
 * Built-in 2 mm aluminium plate.
 */
struct LtMaterial lt_material_aluminum_2mm(void);

/**
 * # Safety
 * `material` and `out` must be valid pointers or null.
 */
enum LtStatus lt_bulk_speeds(const struct LtMaterial *material, struct LtBulkSpeeds *out);

/**
 * Traces `mode` on the grid `fd_step, 2·fd_step, …, fd_max` (Hz·m).
 *
 * # Safety
 * `material` must be valid; `out` receives a handle to free with [`lt_curve_free`].
 */
enum LtStatus lt_trace_mode(const struct LtMaterial *material,
                            enum LtMode mode,
                            double fd_step,
                            double fd_max,
                            struct LtCurve **out);

/**
 * # Safety
 * `curve` must come from [`lt_trace_mode`] and not be used afterwards. Null is ignored.
 */
void lt_curve_free(struct LtCurve *curve);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `curve` must be a live handle or null.
 */
size_t lt_curve_len(const struct LtCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle; `out` a valid pointer.
 */
enum LtStatus lt_curve_sample(const struct LtCurve *curve,
                              size_t index,
                              struct LtDispersionSample *out);

/**
 * Largest group speed with `fd` in `[fd_lo, fd_hi]`, and where it occurs.
 *
 * # Safety
 * `curve` must be a live handle; `speed` and `fd` valid pointers.
 */
enum LtStatus lt_curve_fastest_group_speed(const struct LtCurve *curve,
                                           double fd_lo,
                                           double fd_hi,
                                           double *speed,
                                           double *fd);

/**
 * Copies `len` samples into a new waveform.
 *
 * # Safety
 * `samples` must point to `len` readable doubles; `out` receives a handle to
 * free with [`lt_waveform_free`].
 */
enum LtStatus lt_waveform_new(const double *samples,
                              size_t len,
                              double dt,
                              double t0,
                              struct LtWaveform **out);

/**
 * # Safety
 * `w` must come from this library and not be used afterwards. Null is ignored.
 */
void lt_waveform_free(struct LtWaveform *w);

/**
 * # Safety
 * `w` must be a live handle or null.
 */
size_t lt_waveform_len(const struct LtWaveform *w);

/**
 * Copies up to `capacity` samples into `dst`; `written` receives the count.
 *
 * # Safety
 * `dst` must have room for `capacity` doubles.
 */
enum LtStatus lt_waveform_copy_samples(const struct LtWaveform *w,
                                       double *dst,
                                       size_t capacity,
                                       size_t *written);

/**
 * New waveform with white Gaussian noise at `snr_db` relative to the signal rms.
 *
 * # Safety
 * `w` must be a live handle; `out` a valid pointer.
 */
enum LtStatus lt_add_noise(const struct LtWaveform *w,
                           double snr_db,
                           uint64_t seed,
                           struct LtWaveform **out);

/**
 * New waveform low-pass filtered at `cutoff` Hz (zero phase).
 *
 * # Safety
 * `w` must be a live handle; `out` a valid pointer.
 */
enum LtStatus lt_lowpass(const struct LtWaveform *w, double cutoff, struct LtWaveform **out);

/**
 * First sample with `|s| > threshold`.
 *
 * # Safety
 * `w` must be a live handle; `out` a valid pointer.
 */
enum LtStatus lt_pick_tc(const struct LtWaveform *w, double threshold, struct LtEstimate *out);

/**
 * STA/LTA pick with explicit window lengths in samples.
 *
 * # Safety
 * `w` must be a live handle; `out` a valid pointer.
 */
enum LtStatus lt_pick_sla(const struct LtWaveform *w,
                          size_t n_short,
                          size_t n_long,
                          struct LtEstimate *out);

/**
 * Modified energy ratio pick with an `n_e`-sample window.
 *
 * # Safety
 * `w` must be a live handle; `out` a valid pointer.
 */
enum LtStatus lt_pick_mer(const struct LtWaveform *w, size_t n_e, struct LtEstimate *out);

struct LtAicParams lt_aic_params_default(void);

/**
 * Two-step AIC pick. `params` may be null for the defaults.
 *
 * # Safety
 * `w` must be a live handle; `params` valid or null; `out` a valid pointer.
 */
enum LtStatus lt_pick_aic(const struct LtWaveform *w,
                          const struct LtAicParams *params,
                          enum LtAicVariant variant,
                          struct LtEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAMB_TOA_H */
