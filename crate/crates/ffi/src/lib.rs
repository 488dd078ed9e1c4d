//! C ABI over the affect-drift core: load a fitted model and score rows,
//! plus a few stateless signal and drift helpers.
//!
//! Every function returns an [`AdStatus`]. On failure a message is kept per
//! thread and can be read with [`ad_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use affect_drift::drift::shape_correlation;
use affect_drift::ebm::EbmModel;
use affect_drift::features::{hrv_time_features, poincare_axes};
use affect_drift::preprocess::{design_butterworth_lowpass, filter_zero_phase, IbiSeries};
use affect_drift::signal::Period;
use affect_drift::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Validation = 4,
    /// The quantity is undefined for this input (too short, constant).
    Undefined = 5,
    Panic = 6,
}

/// Opaque fitted model.
pub struct AdModel {
    model: EbmModel,
}

/// Time-domain HRV summary. Undefined entries are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AdHrvTime {
    pub sd: f64,
    pub cv: f64,
    pub rmssd: f64,
    pub pnn50: f64,
    pub hr: f64,
    /// Poincaré long axis, 4 * SD2.
    pub l: f64,
    /// Poincaré short axis, 4 * SD1.
    pub t: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("no interior NUL"));
}

fn fail(status: AdStatus, msg: impl Into<String>) -> AdStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> AdStatus {
    match e {
        Error::Json(_) | Error::Parse { .. } => AdStatus::Parse,
        Error::CutoffOutOfRange { .. } | Error::SignalTooShort { .. } | Error::Config(_) => AdStatus::InvalidArgument,
        _ => AdStatus::Validation,
    }
}

fn guard(f: impl FnOnce() -> AdStatus) -> AdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(AdStatus::Panic, "internal panic"),
    }
}

/// # Safety
/// `ptr` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() {
        return None;
    }
    if len == 0 {
        return Some(&[]);
    }
    Some(std::slice::from_raw_parts(ptr, len))
}

/// Message of the last failure on this thread; empty if none. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ad_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a model from its JSON document (as written by `fit`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ad_model_from_json(json: *const c_char, out: *mut *mut AdModel) -> AdStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(AdStatus::NullPointer, "null argument");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(AdStatus::Parse, "model JSON is not valid UTF-8");
        };
        match EbmModel::from_json(text) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(AdModel { model }));
                AdStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from [`ad_model_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ad_model_free(model: *mut AdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of input features the model expects.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ad_model_feature_count(model: *const AdModel, out: *mut usize) -> AdStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(AdStatus::NullPointer, "null argument");
        }
        *out = (*model).model.features.len();
        AdStatus::Ok
    })
}

/// Probability of high arousal for one row. `period` is 1 or 2; `x` holds
/// the feature values in the model's feature order.
///
/// # Safety
/// `model` must be a live handle, `x` must hold `n` doubles and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ad_model_predict_proba(
    model: *const AdModel,
    x: *const f64,
    n: usize,
    period: u8,
    out: *mut f64,
) -> AdStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(AdStatus::NullPointer, "null argument");
        }
        let Some(x) = slice(x, n) else {
            return fail(AdStatus::NullPointer, "null feature vector");
        };
        let period = match period {
            1 => Period::P1,
            2 => Period::P2,
            p => return fail(AdStatus::InvalidArgument, format!("period must be 1 or 2, got {p}")),
        };
        match (*model).model.predict_proba(x, period) {
            Ok(p) => {
                *out = p;
                AdStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Pearson correlation of two curves of length `n` (at least 3).
///
/// # Safety
/// `a` and `b` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ad_shape_correlation(a: *const f64, b: *const f64, n: usize, out: *mut f64) -> AdStatus {
    guard(|| {
        let (Some(a), Some(b)) = (slice(a, n), slice(b, n)) else {
            return fail(AdStatus::NullPointer, "null curve");
        };
        if out.is_null() {
            return fail(AdStatus::NullPointer, "null output");
        }
        match shape_correlation(a, b) {
            Some(r) => {
                *out = r;
                AdStatus::Ok
            }
            None => fail(AdStatus::Undefined, "correlation undefined (fewer than 3 points or a constant curve)"),
        }
    })
}

/// HRV time-domain features and Poincaré axes of an interval series in ms.
///
/// # Safety
/// `ibi_ms` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ad_hrv_time_features(ibi_ms: *const f64, n: usize, out: *mut AdHrvTime) -> AdStatus {
    guard(|| {
        let Some(x) = slice(ibi_ms, n) else {
            return fail(AdStatus::NullPointer, "null interval array");
        };
        if out.is_null() {
            return fail(AdStatus::NullPointer, "null output");
        }
        if x.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return fail(AdStatus::InvalidArgument, "intervals must be positive and finite");
        }
        let ibi = IbiSeries::from_intervals(x);
        let t = hrv_time_features(&ibi);
        let p = poincare_axes(&ibi, 4.0);
        let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
        *out = AdHrvTime {
            sd: nan(t.sd),
            cv: nan(t.cv),
            rmssd: nan(t.rmssd),
            pnn50: nan(t.pnn50),
            hr: nan(t.hr),
            l: nan(p.l),
            t: nan(p.t),
        };
        AdStatus::Ok
    })
}

/// Zero-phase Butterworth low-pass of `signal` into `out` (both length `n`).
///
/// # Safety
/// `signal` must hold `n` doubles and `out` must have room for `n`.
#[no_mangle]
pub unsafe extern "C" fn ad_filter_zero_phase(
    signal: *const f64,
    n: usize,
    order: u32,
    cutoff_hz: f64,
    rate_hz: f64,
    out: *mut f64,
) -> AdStatus {
    guard(|| {
        let Some(x) = slice(signal, n) else {
            return fail(AdStatus::NullPointer, "null signal");
        };
        if out.is_null() {
            return fail(AdStatus::NullPointer, "null output");
        }
        if order == 0 || !(rate_hz > 0.0) {
            return fail(AdStatus::InvalidArgument, "order must be >= 1 and rate positive");
        }
        let filtered = design_butterworth_lowpass(order as usize, cutoff_hz, rate_hz).and_then(|c| filter_zero_phase(&c, x));
        match filtered {
            Ok(y) => {
                std::slice::from_raw_parts_mut(out, n).copy_from_slice(&y);
                AdStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}
