use serde::{Deserialize, Serialize};

use crate::features::FeatureName;

/// Ascending cut points splitting a feature's axis into `cuts.len() + 1`
/// bins. Bin `k` covers `[cuts[k-1], cuts[k])`; values beyond the extreme
/// cuts fall into the edge bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub feature: FeatureName,
    pub cuts: Vec<f64>,
}

impl BinSpec {
    pub fn single(feature: FeatureName) -> Self {
        Self { feature, cuts: Vec::new() }
    }

    pub fn bin_count(&self) -> usize {
        self.cuts.len() + 1
    }

    pub fn bin_of(&self, x: f64) -> usize {
        self.cuts.partition_point(|&c| c <= x)
    }
}

/// Equal-frequency cut points. Cuts sit midway between neighbouring order
/// statistics at the `k / max_bins` quantile positions; ties shift a cut up
/// to the next distinct value and duplicates are dropped.
pub fn bin_feature(feature: FeatureName, values: &[f64], max_bins: usize) -> BinSpec {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() <= 1 || max_bins <= 1 {
        return BinSpec::single(feature);
    }
    if distinct.len() <= max_bins {
        let cuts = distinct.windows(2).map(|w| midpoint(w[0], w[1])).collect();
        return BinSpec { feature, cuts };
    }

    let n = sorted.len();
    let mut cuts: Vec<f64> = Vec::with_capacity(max_bins - 1);
    for k in 1..max_bins {
        let mut idx = (k * n) / max_bins;
        // First index at or after the quantile position whose value differs
        // from its predecessor.
        while idx < n && sorted[idx] == sorted[idx - 1] {
            idx += 1;
        }
        if idx >= n {
            break;
        }
        let cut = midpoint(sorted[idx - 1], sorted[idx]);
        if cuts.last().map_or(true, |&last| cut > last) {
            cuts.push(cut);
        }
    }
    BinSpec { feature, cuts }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    // Guarantee a < m <= b so that `a` and `b` land in different bins.
    if m <= a {
        b
    } else {
        m
    }
}
