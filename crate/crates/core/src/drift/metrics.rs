use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ebm::Band;
use crate::features::FeatureName;
use crate::stats::{mean, pearson, quantile};

/// Pearson r between two curves on a common grid. Missing when the grids
/// differ in length, have fewer than three points, or either is constant.
pub fn shape_correlation(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() < 3 {
        return None;
    }
    pearson(a, b)
}

/// Fraction of grid points where the closed intervals of the two bands are
/// disjoint.
pub fn ci_nonoverlap(a: &Band, b: &Band) -> f64 {
    let n = a.lo.len().min(b.lo.len());
    if n == 0 {
        return 0.0;
    }
    let disjoint = (0..n).filter(|&k| a.hi[k] < b.lo[k] || b.hi[k] < a.lo[k]).count();
    disjoint as f64 / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStability {
    pub feature: FeatureName,
    pub n: usize,
    pub median: f64,
    pub mean: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Order statistics of the per-participant r values for each feature.
/// Features without any r are omitted.
pub fn aggregate_stability(per_feature: &BTreeMap<FeatureName, Vec<f64>>) -> Vec<FeatureStability> {
    per_feature
        .iter()
        .filter(|(_, rs)| !rs.is_empty())
        .map(|(f, rs)| FeatureStability {
            feature: *f,
            n: rs.len(),
            median: quantile(rs, 0.5).expect("non-empty"),
            mean: mean(rs).expect("non-empty"),
            q1: quantile(rs, 0.25).expect("non-empty"),
            q3: quantile(rs, 0.75).expect("non-empty"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn flat_band(lo: f64, hi: f64, n: usize) -> Band {
        Band {
            mean: vec![(lo + hi) / 2.0; n],
            lo: vec![lo; n],
            hi: vec![hi; n],
        }
    }

    fn brute_pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
        let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let saa: f64 = a.iter().map(|x| x * x).sum();
        let sbb: f64 = b.iter().map(|x| x * x).sum();
        (n * sab - sa * sb) / ((n * saa - sa * sa).sqrt() * (n * sbb - sb * sb).sqrt())
    }

    #[test]
    fn correlation_examples() {
        let grid: Vec<f64> = (0..64).map(|k| -3.0 + 6.0 * k as f64 / 63.0).collect();
        let f: Vec<f64> = grid.iter().map(|x| x.sin() + 0.3 * x).collect();
        assert!((shape_correlation(&f, &f).unwrap() - 1.0).abs() < 1e-12);
        let g: Vec<f64> = f.iter().map(|v| 2.0 * v + 3.0).collect();
        assert!((shape_correlation(&f, &g).unwrap() - 1.0).abs() < 1e-12);

        let bump: Vec<f64> = grid.iter().map(|x| (-x * x / 2.0).exp()).collect();
        let shifted: Vec<f64> = grid.iter().map(|x| (-(x - 1.0) * (x - 1.0) / 2.0).exp()).collect();
        let r = shape_correlation(&bump, &shifted).unwrap();
        assert!(r < 1.0);
        assert!((r - brute_pearson(&bump, &shifted)).abs() < 1e-12);

        assert_eq!(shape_correlation(&[1.0; 10], &f[..10]), None);
        assert_eq!(shape_correlation(&[1.0, 2.0], &[2.0, 1.0]), None);
    }

    #[test]
    fn nonoverlap_examples() {
        let a = flat_band(0.0, 1.0, 10);
        assert_eq!(ci_nonoverlap(&a, &a), 0.0);
        assert_eq!(ci_nonoverlap(&a, &flat_band(2.0, 3.0, 10)), 1.0);
        assert_eq!(ci_nonoverlap(&a, &flat_band(1.0, 2.0, 10)), 0.0);
    }

    #[test]
    fn stability_examples() {
        let mut m = BTreeMap::new();
        m.insert(FeatureName::Hr, vec![1.0, 1.0, 1.0]);
        m.insert(FeatureName::TempAve, vec![0.2, 0.8]);
        m.insert(FeatureName::EdaMin, vec![0.9, 0.9, 0.1]);
        m.insert(FeatureName::AccAve, vec![]);
        let s = aggregate_stability(&m);
        assert_eq!(s.len(), 3);
        let get = |f| s.iter().find(|x| x.feature == f).unwrap();
        assert_eq!((get(FeatureName::Hr).median, get(FeatureName::Hr).mean), (1.0, 1.0));
        assert_eq!(get(FeatureName::TempAve).median, 0.5);
        assert_eq!(get(FeatureName::EdaMin).median, 0.9);
        assert!((get(FeatureName::EdaMin).mean - 1.9 / 3.0).abs() < 1e-12);
    }

    fn curve() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, 8)
    }

    proptest! {
        #[test]
        fn correlation_symmetry_and_affine(a in curve(), b in curve(), s in 0.1f64..10.0, t in -10.0f64..10.0) {
            if let Some(r) = shape_correlation(&a, &b) {
                prop_assert!((-1.0..=1.0).contains(&r));
                prop_assert!((shape_correlation(&b, &a).unwrap() - r).abs() < 1e-12);
                let scaled: Vec<f64> = a.iter().map(|v| s * v + t).collect();
                prop_assert!((shape_correlation(&scaled, &b).unwrap() - r).abs() < 1e-9);
                let neg: Vec<f64> = a.iter().map(|v| -v).collect();
                prop_assert!((shape_correlation(&neg, &b).unwrap() + r).abs() < 1e-12);
            }
        }

        #[test]
        fn nonoverlap_symmetric_and_monotone(
            centers in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..20),
            wa in 0.0f64..1.0, wb in 0.0f64..1.0, grow in 0.0f64..1.0,
        ) {
            let mk = |c: &[f64], w: f64| Band { mean: c.to_vec(), lo: c.iter().map(|v| v - w).collect(), hi: c.iter().map(|v| v + w).collect() };
            let ca: Vec<f64> = centers.iter().map(|p| p.0).collect();
            let cb: Vec<f64> = centers.iter().map(|p| p.1).collect();
            let (a, b) = (mk(&ca, wa), mk(&cb, wb));
            let f = ci_nonoverlap(&a, &b);
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert_eq!(f, ci_nonoverlap(&b, &a));
            prop_assert!(ci_nonoverlap(&mk(&ca, wa + grow), &mk(&cb, wb + grow)) <= f);
        }
    }
}
