use serde::{Deserialize, Serialize};

use super::{map_arousal, ArousalLabel, ArousalMapping, Period, RecordingSession, SampledChannel};

/// Window offsets, in seconds before the annotation, for each slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentTiming {
    /// Length of the stationary window preceding the annotation (BVP, EDA, TEMP).
    pub physio_secs: f64,
    /// Start of the accelerometer window, seconds before the annotation.
    pub acc_lead_secs: f64,
    /// End of the accelerometer window, seconds before the annotation.
    pub acc_lag_secs: f64,
}

impl Default for SegmentTiming {
    fn default() -> Self {
        Self {
            physio_secs: 50.0,
            acc_lead_secs: 240.0,
            acc_lag_secs: 50.0,
        }
    }
}

/// Physiological slices paired with one annotation.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSegment {
    pub participant_id: String,
    pub period: Period,
    pub annotation_time: f64,
    pub bvp: Vec<f64>,
    pub bvp_rate: f64,
    pub eda: Vec<f64>,
    pub eda_rate: f64,
    pub temp: Vec<f64>,
    pub temp_rate: f64,
    pub acc: Vec<[f64; 3]>,
    pub acc_rate: f64,
    pub label: ArousalLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkipReason {
    PhysioWindowOutsideRecording,
    AccWindowOutsideRecording,
    UnmappedCategory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedAnnotation {
    pub timestamp: f64,
    pub reason: SkipReason,
}

pub fn extract_labeled_segments(session: &RecordingSession, mapping: &ArousalMapping) -> Vec<LabeledSegment> {
    let (segments, skipped) = extract_labeled_segments_detailed(session, mapping, SegmentTiming::default());
    for s in &skipped {
        log::warn!(
            "{} {}: annotation at {} skipped ({:?})",
            session.participant_id,
            session.period,
            s.timestamp,
            s.reason
        );
    }
    segments
}

/// Pairs each annotation with its slices. Annotations whose windows do not
/// fit inside the recording are returned in the skip list instead.
pub fn extract_labeled_segments_detailed(
    session: &RecordingSession,
    mapping: &ArousalMapping,
    timing: SegmentTiming,
) -> (Vec<LabeledSegment>, Vec<SkippedAnnotation>) {
    let mut segments = Vec::new();
    let mut skipped = Vec::new();
    for ann in &session.annotations {
        let t = ann.timestamp;
        let skip = |reason| SkippedAnnotation { timestamp: t, reason };

        let label = match map_arousal(ann.category, mapping) {
            Ok(l) => l,
            Err(_) => {
                skipped.push(skip(SkipReason::UnmappedCategory));
                continue;
            }
        };

        let physio = |ch: &SampledChannel| ch.index_range(t - timing.physio_secs, t);
        let (Some(bvp), Some(eda), Some(temp)) = (physio(&session.bvp), physio(&session.eda), physio(&session.temp)) else {
            skipped.push(skip(SkipReason::PhysioWindowOutsideRecording));
            continue;
        };
        let Some(acc) = session.acc.index_range(t - timing.acc_lead_secs, t - timing.acc_lag_secs) else {
            skipped.push(skip(SkipReason::AccWindowOutsideRecording));
            continue;
        };

        let scalar = |ch: &SampledChannel, r: std::ops::Range<usize>| {
            ch.samples().as_scalar().expect("scalar channel")[r].to_vec()
        };
        segments.push(LabeledSegment {
            participant_id: session.participant_id.clone(),
            period: session.period,
            annotation_time: t,
            bvp: scalar(&session.bvp, bvp),
            bvp_rate: session.bvp.rate(),
            eda: scalar(&session.eda, eda),
            eda_rate: session.eda.rate(),
            temp: scalar(&session.temp, temp),
            temp_rate: session.temp.rate(),
            acc: session.acc.samples().as_vector().expect("vector channel")[acc].to_vec(),
            acc_rate: session.acc.rate(),
            label,
        });
    }
    (segments, skipped)
}
