//! Butterworth low-pass design (bilinear transform with pre-warping) and
//! forward-backward zero-phase filtering.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transfer-function coefficients in powers of z^-1, `a[0] == 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterCoefficients {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
    pub order: usize,
    pub cutoff: f64,
    pub rate: f64,
    poles: Vec<(f64, f64)>,
}

impl FilterCoefficients {
    pub fn poles(&self) -> Vec<Complex64> {
        self.poles.iter().map(|&(re, im)| Complex64::new(re, im)).collect()
    }

    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < 1.0)
    }

    /// Complex frequency response at `freq` Hz.
    pub fn response(&self, freq: f64) -> Complex64 {
        let w = 2.0 * PI * freq / self.rate;
        let eval = |c: &[f64]| {
            c.iter()
                .enumerate()
                .map(|(k, &ck)| Complex64::from_polar(ck, -w * k as f64))
                .sum::<Complex64>()
        };
        eval(&self.b) / eval(&self.a)
    }

    pub fn gain(&self, freq: f64) -> f64 {
        self.response(freq).norm()
    }

    pub fn gain_db(&self, freq: f64) -> f64 {
        20.0 * self.gain(freq).log10()
    }

    /// Samples of odd-extension padding used by [`filter_zero_phase`].
    pub fn pad_len(&self) -> usize {
        3 * self.a.len().max(self.b.len())
    }
}

pub fn design_butterworth_lowpass(order: usize, cutoff: f64, rate: f64) -> Result<FilterCoefficients> {
    if order == 0 {
        return Err(Error::Validation("filter order must be at least 1".into()));
    }
    let nyquist = rate / 2.0;
    if !(cutoff > 0.0 && cutoff < nyquist) {
        return Err(Error::CutoffOutOfRange { cutoff, nyquist });
    }

    // Analog cutoff pre-warped so the digital -3 dB point lands on `cutoff`.
    let fs2 = 2.0 * rate;
    let warped = fs2 * (PI * cutoff / rate).tan();
    let poles: Vec<Complex64> = (0..order)
        .map(|k| {
            let theta = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
            let s = Complex64::from_polar(warped, theta);
            (fs2 + s) / (fs2 - s)
        })
        .collect();

    // a(z^-1) = prod (1 - p_k z^-1)
    let mut a = vec![Complex64::new(1.0, 0.0)];
    for p in &poles {
        let mut next = vec![Complex64::new(0.0, 0.0); a.len() + 1];
        for (i, &c) in a.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * p;
        }
        a = next;
    }
    let a: Vec<f64> = a.iter().map(|c| c.re).collect();

    // All zeros at z = -1; scale for unit DC gain.
    let mut b = vec![1.0];
    for _ in 0..order {
        let mut next = vec![0.0; b.len() + 1];
        for (i, &c) in b.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c;
        }
        b = next;
    }
    let dc = a.iter().sum::<f64>() / b.iter().sum::<f64>();
    b.iter_mut().for_each(|c| *c *= dc);

    Ok(FilterCoefficients {
        b,
        a,
        order,
        cutoff,
        rate,
        poles: poles.iter().map(|p| (p.re, p.im)).collect(),
    })
}

/// Direct-form II transposed filter starting from state `zi`.
fn lfilter(b: &[f64], a: &[f64], x: &[f64], zi: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let mut z = zi.to_vec();
    let mut y = Vec::with_capacity(x.len());
    for &xk in x {
        let yk = b[0] * xk + z.first().copied().unwrap_or(0.0);
        for i in 0..n {
            let carry = if i + 1 < n { z[i + 1] } else { 0.0 };
            z[i] = b[i + 1] * xk - a[i + 1] * yk + carry;
        }
        y.push(yk);
    }
    y
}

/// Steady-state filter state for a unit step input.
fn step_state(b: &[f64], a: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let g = b.iter().sum::<f64>() / a.iter().sum::<f64>();
    let mut zi = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc += b[i + 1] - a[i + 1] * g;
        zi[i] = acc;
    }
    zi
}

/// Forward-backward filtering with odd-extension edge padding and
/// step-response initial conditions. Output has the input's length and zero
/// phase shift; magnitude response is squared.
pub fn filter_zero_phase(coeffs: &FilterCoefficients, signal: &[f64]) -> Result<Vec<f64>> {
    let pad = coeffs.pad_len();
    if signal.len() <= pad {
        return Err(Error::SignalTooShort { len: signal.len(), min: pad });
    }
    let n = signal.len();
    let first = signal[0];
    let last = signal[n - 1];
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((0..pad).map(|i| 2.0 * first - signal[pad - i]));
    ext.extend_from_slice(signal);
    ext.extend((0..pad).map(|i| 2.0 * last - signal[n - 2 - i]));

    let zi = step_state(&coeffs.b, &coeffs.a);
    let scaled = |s: f64| zi.iter().map(|z| z * s).collect::<Vec<_>>();

    let mut y = lfilter(&coeffs.b, &coeffs.a, &ext, &scaled(ext[0]));
    y.reverse();
    let mut y = lfilter(&coeffs.b, &coeffs.a, &y, &scaled(y[0]));
    y.reverse();
    Ok(y[pad..pad + n].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Magnitude of a bilinear-transformed Butterworth low-pass, evaluated
    /// directly from its closed form.
    fn analytic_gain(order: usize, cutoff: f64, rate: f64, f: f64) -> f64 {
        let ratio = (PI * f / rate).tan() / (PI * cutoff / rate).tan();
        1.0 / (1.0 + ratio.powi(2 * order as i32)).sqrt()
    }

    #[test]
    fn design_matches_analytic_response() {
        let c = design_butterworth_lowpass(4, 3.0, 64.0).unwrap();
        assert!((c.gain(0.0) - 1.0).abs() < 1e-9);
        assert!((c.gain_db(3.0) + 3.0103).abs() < 0.1, "{}", c.gain_db(3.0));
        assert!(c.gain_db(10.0) <= -40.0, "{}", c.gain_db(10.0));
        for f in [0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 31.0] {
            let expect = analytic_gain(4, 3.0, 64.0, f);
            assert!((c.gain(f) - expect).abs() < 1e-9, "f={f}: {} vs {expect}", c.gain(f));
        }
        assert_eq!(c.a[0], 1.0);
    }

    #[test]
    fn poles_are_roots_of_denominator_and_stable() {
        for order in 1..=8 {
            for &(fc, fs) in &[(3.0, 64.0), (0.5, 4.0), (10.0, 32.0), (30.0, 64.0)] {
                let c = design_butterworth_lowpass(order, fc, fs).unwrap();
                assert!(c.is_stable());
                for p in c.poles() {
                    let v: Complex64 = c.a.iter().enumerate().map(|(k, &ak)| ak * p.powi(-(k as i32))).sum();
                    assert!(v.norm() < 1e-8, "order {order}: residual {}", v.norm());
                }
            }
        }
    }

    #[test]
    fn rejects_cutoff_at_nyquist() {
        assert!(matches!(design_butterworth_lowpass(4, 32.0, 64.0), Err(Error::CutoffOutOfRange { .. })));
        assert!(design_butterworth_lowpass(4, 0.0, 64.0).is_err());
        assert!(design_butterworth_lowpass(0, 3.0, 64.0).is_err());
    }

    #[test]
    fn constant_passes_unchanged() {
        let c = design_butterworth_lowpass(4, 3.0, 64.0).unwrap();
        let y = filter_zero_phase(&c, &[2.5; 300]).unwrap();
        assert!(y.iter().all(|v| (v - 2.5).abs() < 1e-9));
    }

    #[test]
    fn passband_sine_keeps_amplitude_and_phase() {
        let c = design_butterworth_lowpass(4, 3.0, 64.0).unwrap();
        let x: Vec<f64> = (0..64 * 20).map(|i| (2.0 * PI * 1.0 * i as f64 / 64.0).sin()).collect();
        let y = filter_zero_phase(&c, &x).unwrap();
        assert_eq!(y.len(), x.len());
        let expected = analytic_gain(4, 3.0, 64.0, 1.0).powi(2);
        let mid = &y[256..y.len() - 256];
        let amp = mid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((amp - expected).abs() < 0.01, "{amp}");
        assert!((amp - 1.0).abs() < 0.01);
    }

    #[test]
    fn slow_sine_peak_location_unchanged() {
        let c = design_butterworth_lowpass(4, 3.0, 64.0).unwrap();
        let x: Vec<f64> = (0..64 * 10).map(|i| (2.0 * PI * 0.5 * i as f64 / 64.0).sin()).collect();
        let y = filter_zero_phase(&c, &x).unwrap();
        let argmax = |v: &[f64], r: std::ops::Range<usize>| r.max_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap();
        // Second peak of the 0.5 Hz sine sits at t = 2.5 s.
        let range = 64..256;
        assert!((argmax(&x, range.clone()) as i64 - argmax(&y, range) as i64).abs() <= 1);
    }

    #[test]
    fn zero_lag_cross_correlation() {
        let c = design_butterworth_lowpass(4, 3.0, 64.0).unwrap();
        let x: Vec<f64> = (0..64 * 16).map(|i| (2.0 * PI * 1.5 * i as f64 / 64.0).sin()).collect();
        let y = filter_zero_phase(&c, &x).unwrap();
        let xc = |lag: i64| -> f64 {
            (128..x.len() - 128).map(|i| x[i] * y[(i as i64 + lag) as usize]).sum()
        };
        let best = (-20..=20).max_by(|&a, &b| xc(a).total_cmp(&xc(b))).unwrap();
        assert_eq!(best, 0);
    }

    #[test]
    fn short_signal_errors() {
        let c = design_butterworth_lowpass(4, 3.0, 64.0).unwrap();
        assert!(matches!(filter_zero_phase(&c, &[0.0; 15]), Err(Error::SignalTooShort { .. })));
        assert!(filter_zero_phase(&c, &[0.0; 16]).is_ok());
    }
}
