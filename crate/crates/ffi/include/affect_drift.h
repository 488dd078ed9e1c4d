#ifndef AFFECT_DRIFT_H
#define AFFECT_DRIFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum AdStatus {
  AD_STATUS_OK = 0,
  AD_STATUS_NULL_POINTER = 1,
  AD_STATUS_INVALID_ARGUMENT = 2,
  AD_STATUS_PARSE = 3,
  AD_STATUS_VALIDATION = 4,
  // The quantity is undefined for this input (too short, constant).
  AD_STATUS_UNDEFINED = 5,
  AD_STATUS_PANIC = 6,
} AdStatus;

// Opaque fitted model.
typedef struct AdModel AdModel;

// Time-domain HRV summary. Undefined entries are NaN.
typedef struct AdHrvTime {
  double sd;
  double cv;
  double rmssd;
  double pnn50;
  double hr;
  // Poincaré long axis, 4 * SD2.
  double l;
  // Poincaré short axis, 4 * SD1.
  double t;
} AdHrvTime;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty if none. The pointer is
// valid until the next failing call on the same thread.
const char *ad_last_error_message(void);

// Parses a model from its JSON document (as written by `fit`).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum AdStatus ad_model_from_json(const char *json, struct AdModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must come from [`ad_model_from_json`] and not be freed twice.
void ad_model_free(struct AdModel *model);

// Number of input features the model expects.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum AdStatus ad_model_feature_count(const struct AdModel *model, size_t *out);

// Probability of high arousal for one row. `period` is 1 or 2; `x` holds
// the feature values in the model's feature order.
//
// # Safety
// `model` must be a live handle, `x` must hold `n` doubles and `out` must be
// writable.
enum AdStatus ad_model_predict_proba(const struct AdModel *model,
                                     const double *x,
                                     size_t n,
                                     uint8_t period,
                                     double *out);

// Pearson correlation of two curves of length `n` (at least 3).
//
// # Safety
// `a` and `b` must hold `n` doubles; `out` must be writable.
enum AdStatus ad_shape_correlation(const double *a, const double *b, size_t n, double *out);

// HRV time-domain features and Poincaré axes of an interval series in ms.
//
// # Safety
// `ibi_ms` must hold `n` doubles; `out` must be writable.
enum AdStatus ad_hrv_time_features(const double *ibi_ms, size_t n, struct AdHrvTime *out);

// Zero-phase Butterworth low-pass of `signal` into `out` (both length `n`).
//
// # Safety
// `signal` must hold `n` doubles and `out` must have room for `n`.
enum AdStatus ad_filter_zero_phase(const double *signal,
                                   size_t n,
                                   uint32_t order,
                                   double cutoff_hz,
                                   double rate_hz,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AFFECT_DRIFT_H */
