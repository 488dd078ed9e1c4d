use serde::{Deserialize, Serialize};

use crate::preprocess::IbiSeries;
use crate::stats::{mean, sample_sd};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HrvTimeFeatures {
    /// ms
    pub sd: Option<f64>,
    pub cv: Option<f64>,
    /// ms
    pub rmssd: Option<f64>,
    /// percent
    pub pnn50: Option<f64>,
    /// beats per minute
    pub hr: Option<f64>,
}

pub fn hrv_time_features(ibi: &IbiSeries) -> HrvTimeFeatures {
    let x = &ibi.intervals;
    let m = mean(x);
    let sd = sample_sd(x);
    let diffs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let rmssd = mean(&diffs.iter().map(|d| d * d).collect::<Vec<_>>()).map(f64::sqrt);
    let pnn50 = (!diffs.is_empty())
        .then(|| 100.0 * diffs.iter().filter(|d| d.abs() > 50.0).count() as f64 / diffs.len() as f64);
    HrvTimeFeatures {
        sd,
        cv: sd.zip(m).map(|(s, m)| s / m),
        rmssd,
        pnn50,
        hr: m.map(|m| 60_000.0 / m),
    }
}

/// Poincaré ellipse axes: `T` (short) and `L` (long), each `scale` times the
/// corresponding SD1/SD2 dispersion.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PoincareAxes {
    pub sd1: Option<f64>,
    pub sd2: Option<f64>,
    pub l: Option<f64>,
    pub t: Option<f64>,
}

pub fn poincare_axes(ibi: &IbiSeries, scale: f64) -> PoincareAxes {
    let x = &ibi.intervals;
    if x.len() < 3 {
        return PoincareAxes::default();
    }
    let pairs = x.windows(2);
    let minor: Vec<f64> = pairs.clone().map(|w| (w[0] - w[1]) / std::f64::consts::SQRT_2).collect();
    let major: Vec<f64> = pairs.map(|w| (w[0] + w[1]) / std::f64::consts::SQRT_2).collect();
    let sd1 = sample_sd(&minor);
    let sd2 = sample_sd(&major);
    PoincareAxes {
        sd1,
        sd2,
        l: sd2.map(|s| scale * s),
        t: sd1.map(|s| scale * s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_example() {
        let f = hrv_time_features(&IbiSeries::from_intervals(&[800.0, 810.0, 790.0]));
        assert!((f.sd.unwrap() - 10.0).abs() < 1e-12);
        assert!((f.cv.unwrap() - 0.0125).abs() < 1e-15);
        assert!((f.rmssd.unwrap() - 250f64.sqrt()).abs() < 1e-12);
        assert_eq!(f.pnn50, Some(0.0));
        assert!((f.hr.unwrap() - 75.0).abs() < 1e-12);
    }

    #[test]
    fn constant_series() {
        let f = hrv_time_features(&IbiSeries::from_intervals(&[1000.0; 10]));
        assert_eq!(f.sd, Some(0.0));
        assert_eq!(f.cv, Some(0.0));
        assert_eq!(f.rmssd, Some(0.0));
        assert_eq!(f.pnn50, Some(0.0));
        assert_eq!(f.hr, Some(60.0));
        let p = poincare_axes(&IbiSeries::from_intervals(&[1000.0; 10]), 4.0);
        assert_eq!(p.l, Some(0.0));
        assert_eq!(p.t, Some(0.0));
    }

    #[test]
    fn single_large_difference() {
        let f = hrv_time_features(&IbiSeries::from_intervals(&[800.0, 860.0]));
        assert_eq!(f.pnn50, Some(100.0));
    }

    #[test]
    fn insufficient_intervals_are_missing() {
        let f = hrv_time_features(&IbiSeries::from_intervals(&[800.0]));
        assert_eq!(f.sd, None);
        assert_eq!(f.rmssd, None);
        assert_eq!(f.pnn50, None);
        assert_eq!(f.hr, Some(75.0));
        assert_eq!(hrv_time_features(&IbiSeries::default()).hr, None);
        assert_eq!(poincare_axes(&IbiSeries::from_intervals(&[800.0, 810.0]), 4.0), PoincareAxes::default());
    }

    /// Direct SD1/SD2 from the successive-pair lists.
    fn oracle(x: &[f64]) -> (f64, f64) {
        let n = x.len() - 1;
        let d: Vec<f64> = (0..n).map(|i| (x[i] - x[i + 1]) / 2f64.sqrt()).collect();
        let s: Vec<f64> = (0..n).map(|i| (x[i] + x[i + 1]) / 2f64.sqrt()).collect();
        let sd = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
        };
        (sd(&d), sd(&s))
    }

    #[test]
    fn poincare_matches_pair_oracle() {
        let x = [800.0, 810.0, 790.0, 810.0];
        let (sd1, sd2) = oracle(&x);
        let p = poincare_axes(&IbiSeries::from_intervals(&x), 4.0);
        assert!((p.t.unwrap() - 4.0 * sd1).abs() < 1e-9);
        assert!((p.l.unwrap() - 4.0 * sd2).abs() < 1e-9);
    }

    #[test]
    fn alternation_loads_the_short_axis() {
        let x: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 800.0 } else { 900.0 }).collect();
        let (sd1, sd2) = oracle(&x);
        let p = poincare_axes(&IbiSeries::from_intervals(&x), 4.0);
        assert!((p.t.unwrap() - 4.0 * sd1).abs() < 1e-9);
        assert!((p.l.unwrap() - 4.0 * sd2).abs() < 1e-9);
        assert!(p.t.unwrap() > 100.0);
        assert!(p.l.unwrap() < 1e-9);
    }
}
