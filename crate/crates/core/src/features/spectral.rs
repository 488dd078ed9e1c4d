//! Frequency-domain HRV: the IBI tachogram is resampled onto a uniform grid
//! with a natural cubic spline, detrended by its mean, Hann-windowed, and
//! integrated over the LF and HF bands of its one-sided periodogram.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::preprocess::IbiSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub resample_hz: f64,
    /// Half-open `[lo, hi)`.
    pub lf_band: (f64, f64),
    /// Closed `[lo, hi]`.
    pub hf_band: (f64, f64),
    pub min_intervals: usize,
    pub min_span_secs: f64,
    /// Minimum FFT length; shorter tachograms are zero-padded.
    pub min_fft_len: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            resample_hz: 4.0,
            lf_band: (0.04, 0.15),
            hf_band: (0.15, 0.4),
            min_intervals: 4,
            min_span_secs: 10.0,
            min_fft_len: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HrvFreqFeatures {
    /// ms²
    pub lf: Option<f64>,
    /// ms²
    pub hf: Option<f64>,
    pub lf_hf: Option<f64>,
}

/// Power below this is treated as zero when forming LF/HF.
const ZERO_POWER: f64 = 1e-12;

pub fn hrv_freq_features(ibi: &IbiSeries, config: &SpectralConfig) -> HrvFreqFeatures {
    let t = &ibi.interval_times;
    let y = &ibi.intervals;
    if y.len() < config.min_intervals.max(3) {
        return HrvFreqFeatures::default();
    }
    let span = t[t.len() - 1] - t[0];
    if span < config.min_span_secs {
        return HrvFreqFeatures::default();
    }

    let spline = natural_cubic_spline(t, y);
    let fs = config.resample_hz;
    let n = (span * fs).floor() as usize + 1;
    let mut tach: Vec<f64> = (0..n).map(|j| spline(t[0] + j as f64 / fs)).collect();
    let m = tach.iter().sum::<f64>() / n as f64;
    tach.iter_mut().for_each(|v| *v -= m);

    let window: Vec<f64> = (0..n).map(|j| 0.5 - 0.5 * (2.0 * PI * j as f64 / n as f64).cos()).collect();
    let window_power: f64 = window.iter().map(|w| w * w).sum();

    let nfft = n.next_power_of_two().max(config.min_fft_len);
    let mut buf: Vec<Complex64> = tach
        .iter()
        .zip(&window)
        .map(|(v, w)| Complex64::new(v * w, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(nfft)
        .collect();
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);

    let df = fs / nfft as f64;
    let mut lf = 0.0;
    let mut hf = 0.0;
    for (k, x) in buf.iter().enumerate().take(nfft / 2 + 1) {
        let f = k as f64 * df;
        let one_sided = if k == 0 || k == nfft / 2 { 1.0 } else { 2.0 };
        let psd = one_sided * x.norm_sqr() / (fs * window_power);
        if f >= config.lf_band.0 && f < config.lf_band.1 {
            lf += psd * df;
        } else if f >= config.hf_band.0 && f <= config.hf_band.1 {
            hf += psd * df;
        }
    }
    HrvFreqFeatures {
        lf: Some(lf),
        hf: Some(hf),
        lf_hf: (hf > ZERO_POWER).then(|| lf / hf),
    }
}

/// Natural cubic spline through strictly increasing knots `x`. Evaluation
/// outside the knot range extrapolates the end polynomials.
pub fn natural_cubic_spline<'a>(x: &'a [f64], y: &'a [f64]) -> impl Fn(f64) -> f64 + 'a {
    let n = x.len();
    assert!(n >= 2 && y.len() == n, "spline needs at least two matching knots");
    // Second derivatives by the tridiagonal (Thomas) solve, zero at the ends.
    let mut m = vec![0.0; n];
    if n > 2 {
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let k = n - 2;
        let mut diag = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for i in 0..k {
            diag[i] = 2.0 * (h[i] + h[i + 1]);
            rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
        }
        for i in 1..k {
            let w = h[i] / diag[i - 1];
            diag[i] -= w * h[i];
            rhs[i] -= w * rhs[i - 1];
        }
        m[k] = rhs[k - 1] / diag[k - 1];
        for i in (0..k - 1).rev() {
            m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
        }
    }
    move |t: f64| {
        let i = x.partition_point(|&xi| xi <= t).saturating_sub(1).min(n - 2);
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - t) / h;
        let b = (t - x[i]) / h;
        a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0
    }
}
