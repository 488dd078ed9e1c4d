use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureName, FeatureVector};
use crate::stats::{mean, sample_sd};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierRecord {
    pub participant: String,
    pub feature: FeatureName,
    pub timestamp: f64,
    pub value: f64,
    pub zscore: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutlierRemoval {
    pub rows: Vec<FeatureVector>,
    pub log: Vec<OutlierRecord>,
    /// Rows removed because they lost one of the required features.
    pub dropped_rows: usize,
}

pub fn remove_outliers_3sigma(rows: Vec<FeatureVector>, required: &[FeatureName]) -> OutlierRemoval {
    remove_outliers_sigma(rows, required, 3.0)
}

/// Single pass of per-participant, per-feature outlier nulling. Statistics
/// pool both periods; values with `|x - mean| > k * sd` become missing. A
/// zero SD removes nothing. Rows that lost any `required` feature are dropped.
pub fn remove_outliers_sigma(mut rows: Vec<FeatureVector>, required: &[FeatureName], k: f64) -> OutlierRemoval {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        groups.entry(r.participant_id.clone()).or_default().push(i);
    }

    let mut log = Vec::new();
    let mut lost_required = vec![false; rows.len()];
    for (participant, idx) in &groups {
        for feature in FeatureName::ALL {
            let present: Vec<(usize, f64)> = idx.iter().filter_map(|&i| rows[i].get(feature).map(|v| (i, v))).collect();
            let values: Vec<f64> = present.iter().map(|p| p.1).collect();
            let (Some(m), Some(sd)) = (mean(&values), sample_sd(&values)) else {
                continue;
            };
            if sd == 0.0 {
                continue;
            }
            for (i, v) in present {
                let z = (v - m) / sd;
                if z.abs() > k {
                    rows[i].set(feature, None);
                    lost_required[i] |= required.contains(&feature);
                    log.push(OutlierRecord {
                        participant: participant.clone(),
                        feature,
                        timestamp: rows[i].timestamp,
                        value: v,
                        zscore: z,
                    });
                }
            }
        }
    }

    let dropped_rows = lost_required.iter().filter(|l| **l).count();
    let rows = rows
        .into_iter()
        .zip(lost_required)
        .filter_map(|(r, lost)| (!lost).then_some(r))
        .collect();
    OutlierRemoval { rows, log, dropped_rows }
}

pub fn write_outlier_log(log: &[OutlierRecord], config_hash: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = config_hash {
        out.push_str(&format!("# config_hash={h}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["participant", "feature", "timestamp", "value", "zscore"]).expect("in-memory csv");
    for r in log {
        w.write_record([
            r.participant.clone(),
            r.feature.to_string(),
            r.timestamp.to_string(),
            r.value.to_string(),
            r.zscore.to_string(),
        ])
        .expect("in-memory csv");
    }
    out.push_str(std::str::from_utf8(&w.into_inner().expect("flush")).expect("utf-8"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{ArousalLabel, Period};
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn rows(values: &[f64]) -> Vec<FeatureVector> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let period = if i % 2 == 0 { Period::P1 } else { Period::P2 };
                FeatureVector::new("A", period, i as f64, ArousalLabel::Low).with(FeatureName::Hr, *v)
            })
            .collect()
    }

    #[test]
    fn far_value_removed_per_zscore_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut values: Vec<f64> = (0..100).map(|_| StandardNormal.sample(&mut rng)).collect();
        values.push(10.0);
        // Oracle: recompute mean and sample SD directly.
        let n = values.len() as f64;
        let m = values.iter().sum::<f64>() / n;
        let sd = (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let expected: Vec<f64> = values.iter().copied().filter(|v| ((v - m) / sd).abs() > 3.0).collect();
        assert!(expected.contains(&10.0));

        let out = remove_outliers_3sigma(rows(&values), &[FeatureName::Hr]);
        let removed: Vec<f64> = out.log.iter().map(|r| r.value).collect();
        assert_eq!(removed, expected);
        assert_eq!(out.rows.len(), values.len() - expected.len());
        assert_eq!(out.dropped_rows, expected.len());
    }

    #[test]
    fn zero_sd_keeps_everything() {
        let out = remove_outliers_3sigma(rows(&[5.0; 20]), &[FeatureName::Hr]);
        assert!(out.log.is_empty());
        assert_eq!(out.rows.len(), 20);
    }

    #[test]
    fn value_on_the_threshold_is_kept() {
        let values = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 30.0];
        let m = mean(&values).unwrap();
        let sd = sample_sd(&values).unwrap();
        let z_max = (30.0 - m) / sd;
        let out = remove_outliers_sigma(rows(&values), &[FeatureName::Hr], z_max);
        assert!(out.log.is_empty(), "{:?}", out.log);
        let out = remove_outliers_sigma(rows(&values), &[FeatureName::Hr], z_max * (1.0 - 1e-12));
        assert_eq!(out.log.len(), 1);
    }

    #[test]
    fn unrequired_feature_nulled_but_row_kept() {
        let mut rs = rows(&[1.0; 30]);
        for (i, r) in rs.iter_mut().enumerate() {
            r.set(FeatureName::EdaMin, Some(if i == 0 { 100.0 } else { (i % 3) as f64 }));
        }
        let out = remove_outliers_3sigma(rs, &[FeatureName::Hr]);
        assert_eq!(out.rows.len(), 30);
        assert_eq!(out.rows[0].get(FeatureName::EdaMin), None);
        assert_eq!(out.log.len(), 1);
    }

    #[test]
    fn participants_are_separate_groups() {
        let mut rs = rows(&[0.0; 20]);
        rs.extend((0..20).map(|i| FeatureVector::new("B", Period::P1, i as f64, ArousalLabel::High).with(FeatureName::Hr, 1000.0 + (i % 2) as f64)));
        let out = remove_outliers_3sigma(rs, &[FeatureName::Hr]);
        assert!(out.log.is_empty());
    }

    #[test]
    fn log_csv_header() {
        let text = write_outlier_log(&[], None);
        assert_eq!(text, "participant,feature,timestamp,value,zscore\n");
    }
}
