use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TruthSpec;
use crate::features::FeatureVector;
use crate::seed::{derive_seed, str_key};
use crate::signal::{ArousalLabel, Period};
use crate::stats::sigmoid;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRow {
    pub vector: FeatureVector,
    pub true_logit: f64,
}

/// True log-odds of a row under the spec. Features absent from `v`
/// contribute nothing.
pub fn true_logit(spec: &TruthSpec, v: &FeatureVector) -> f64 {
    let mut s = spec.intercept;
    for t in &spec.features {
        if let Some(x) = v.get(t.feature) {
            s += t.f_com(x);
            if v.period.is_second() {
                s += t.f_int(x);
            }
        }
    }
    s
}

pub(crate) fn annotation_time(spec: &TruthSpec, i: usize) -> f64 {
    let l = &spec.session;
    l.start_time + l.lead_secs + i as f64 * l.spacing_secs
}

pub(crate) fn rng_for(spec: &TruthSpec, participant: &str, period: Period, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &[str_key(participant), period.delta() as u64, stream]))
}

pub(crate) fn draw_label(rng: &mut ChaCha8Rng, logit: f64) -> ArousalLabel {
    if rng.gen_bool(sigmoid(logit)) {
        ArousalLabel::High
    } else {
        ArousalLabel::Low
    }
}

/// Draws `n_per_period` rows for one participant and period: features from
/// their marginals, labels from the spec's logistic mechanism.
pub fn sample_features(spec: &TruthSpec, participant: &str, period: Period) -> Vec<SyntheticRow> {
    let mut rng = rng_for(spec, participant, period, 0);
    (0..spec.n_per_period)
        .map(|i| {
            let mut v = FeatureVector::new(participant, period, annotation_time(spec, i), ArousalLabel::Low);
            for t in &spec.features {
                v.set(t.feature, Some(t.marginal.sample(&mut rng)));
            }
            let logit = true_logit(spec, &v);
            v.label = draw_label(&mut rng, logit);
            SyntheticRow {
                vector: v,
                true_logit: logit,
            }
        })
        .collect()
}

/// Every participant, period 1 then period 2.
pub fn sample_dataset(spec: &TruthSpec) -> Vec<SyntheticRow> {
    let mut out = Vec::new();
    for p in &spec.participants {
        for period in [Period::P1, Period::P2] {
            out.extend(sample_features(spec, p, period));
        }
    }
    out
}

pub fn write_truth_csv(rows: &[SyntheticRow], config_hash: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = config_hash {
        let _ = writeln!(out, "# config_hash={h}");
    }
    out.push_str("participant,period,timestamp,true_logit\n");
    for r in rows {
        let v = &r.vector;
        let _ = writeln!(out, "{},{},{},{}", v.participant_id, v.period, v.timestamp, r.true_logit);
    }
    out
}
