use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdaFeatures {
    pub ave: f64,
    pub max: f64,
    pub min: f64,
    pub diff: f64,
}

/// Mean, extrema and range of an EDA slice in µS; `None` when empty.
pub fn eda_features(eda: &[f64]) -> Option<EdaFeatures> {
    if eda.is_empty() {
        return None;
    }
    let max = eda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eda.iter().copied().fold(f64::INFINITY, f64::min);
    // Clamp guards the ave-within-extrema invariant against summation rounding.
    let ave = (eda.iter().sum::<f64>() / eda.len() as f64).clamp(min, max);
    Some(EdaFeatures {
        ave,
        max,
        min,
        diff: max - min,
    })
}

pub fn temp_feature(temp: &[f64]) -> Option<f64> {
    crate::stats::mean(temp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccFeatures {
    pub ave: f64,
    pub max: f64,
}

/// Mean and maximum of per-sample acceleration magnitude in g.
pub fn acc_features(acc: &[[f64; 3]]) -> Option<AccFeatures> {
    if acc.is_empty() {
        return None;
    }
    let mags: Vec<f64> = acc.iter().map(|[x, y, z]| (x * x + y * y + z * z).sqrt()).collect();
    let max = mags.iter().copied().fold(0.0, f64::max);
    let ave = (mags.iter().sum::<f64>() / mags.len() as f64).min(max);
    Some(AccFeatures { ave, max })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eda_examples() {
        let f = eda_features(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((f.ave, f.max, f.min, f.diff), (2.0, 3.0, 1.0, 2.0));
        let f = eda_features(&[0.5; 200]).unwrap();
        assert_eq!((f.ave, f.max, f.min, f.diff), (0.5, 0.5, 0.5, 0.0));
        assert!(eda_features(&[]).is_none());
    }

    #[test]
    fn eda_ramp_closed_form() {
        let ramp: Vec<f64> = (0..200).map(|i| i as f64 / 199.0).collect();
        let f = eda_features(&ramp).unwrap();
        assert!((f.diff - 1.0).abs() < 1e-12);
        assert!((f.ave - 0.5).abs() <= 1.0 / 199.0);
    }

    #[test]
    fn temp_examples() {
        assert_eq!(temp_feature(&[33.0; 200]), Some(33.0));
        assert_eq!(temp_feature(&[32.0, 34.0]), Some(33.0));
        let ramp: Vec<f64> = (0..200).map(|i| 32.0 + 2.0 * i as f64 / 199.0).collect();
        assert!((temp_feature(&ramp).unwrap() - 33.0).abs() < 0.01);
        assert_eq!(temp_feature(&[]), None);
    }

    #[test]
    fn acc_examples() {
        let f = acc_features(&[[1.0, 0.0, 0.0]; 10]).unwrap();
        assert_eq!((f.ave, f.max), (1.0, 1.0));
        let f = acc_features(&[[0.0, 0.0, 0.0], [0.0, 0.6, 0.8]]).unwrap();
        assert!((f.ave - 0.5).abs() < 1e-15);
        assert!((f.max - 1.0).abs() < 1e-15);
        assert!(acc_features(&[]).is_none());
    }

    #[test]
    fn eda_scales_linearly() {
        let x: Vec<f64> = (0..50).map(|i| 0.3 + (i as f64 * 0.37).sin().abs()).collect();
        let a = 2.0;
        let scaled: Vec<f64> = x.iter().map(|v| v * a).collect();
        let f = eda_features(&x).unwrap();
        let g = eda_features(&scaled).unwrap();
        assert_eq!(g.max, a * f.max);
        assert_eq!(g.min, a * f.min);
        assert_eq!(g.diff, g.max - g.min);
        assert!((g.ave - a * f.ave).abs() < 1e-12);
    }
}
