use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{acc_features, eda_features, hrv_freq_features, hrv_time_features, poincare_axes, temp_feature};
use super::{FeatureName, FeatureVector, SpectralConfig};
use crate::error::{Error, Result};
use crate::preprocess::{
    assess_quality, beats_to_ibi, design_butterworth_lowpass, detect_beats, filter_zero_phase, window_ranges,
    BeatDetectorConfig, IbiRange, QualityConfig, QualityReason,
};
use crate::signal::{LabeledSegment, Period};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub filter_order: usize,
    pub filter_cutoff_hz: f64,
    pub beats: BeatDetectorConfig,
    pub ibi_range: IbiRange,
    pub quality: QualityConfig,
    pub window_secs: f64,
    pub stride_secs: f64,
    /// Multiplier from SD1/SD2 to the Poincaré axis lengths.
    pub poincare_scale: f64,
    pub spectral: SpectralConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            filter_order: 4,
            filter_cutoff_hz: 3.0,
            beats: BeatDetectorConfig::default(),
            ibi_range: IbiRange::default(),
            quality: QualityConfig::default(),
            window_secs: 30.0,
            stride_secs: 5.0,
            poincare_scale: 4.0,
            spectral: SpectralConfig::default(),
        }
    }
}

const BVP_FEATURES: [FeatureName; 10] = [
    FeatureName::Sd,
    FeatureName::Cv,
    FeatureName::Rmssd,
    FeatureName::Pnn50,
    FeatureName::Hr,
    FeatureName::L,
    FeatureName::T,
    FeatureName::Lf,
    FeatureName::Hf,
    FeatureName::LfHf,
];

/// Computes all seventeen features for one segment. BVP-derived features are
/// averaged over the overlapping windows; a feature missing in any window is
/// missing for the segment.
pub fn extract_feature_vector(segment: &LabeledSegment, config: &FeatureConfig) -> Result<FeatureVector> {
    let rate = segment.bvp_rate;
    let coeffs = design_butterworth_lowpass(config.filter_order, config.filter_cutoff_hz, rate)?;
    let filtered = filter_zero_phase(&coeffs, &segment.bvp)?;
    let beats = detect_beats(&filtered, rate, &config.beats);
    let ibi = beats_to_ibi(&beats, &config.ibi_range);

    let duration = segment.bvp.len() as f64 / rate;
    let quality = assess_quality(&ibi, duration, &config.quality);
    if !quality.accepted {
        return Err(Error::QualityRejected(quality.reason));
    }

    let windows = window_ranges(segment.bvp.len(), rate, config.window_secs, config.stride_secs)?;
    let mut sums = [Some(0.0); BVP_FEATURES.len()];
    for w in &windows {
        let sub = ibi.restrict(w.start as f64 / rate, w.end as f64 / rate, &config.ibi_range);
        let time = hrv_time_features(&sub);
        let axes = poincare_axes(&sub, config.poincare_scale);
        let freq = hrv_freq_features(&sub, &config.spectral);
        let values = [
            time.sd, time.cv, time.rmssd, time.pnn50, time.hr, axes.l, axes.t, freq.lf, freq.hf, freq.lf_hf,
        ];
        for (acc, v) in sums.iter_mut().zip(values) {
            *acc = acc.zip(v).map(|(a, b)| a + b);
        }
    }

    let mut out = FeatureVector::new(
        segment.participant_id.clone(),
        segment.period,
        segment.annotation_time,
        segment.label,
    );
    let count = windows.len() as f64;
    for (name, sum) in BVP_FEATURES.iter().zip(sums) {
        out.set(*name, sum.map(|s| s / count));
    }

    if let Some(eda) = eda_features(&segment.eda) {
        out.set(FeatureName::EdaAve, Some(eda.ave));
        out.set(FeatureName::EdaMax, Some(eda.max));
        out.set(FeatureName::EdaMin, Some(eda.min));
        out.set(FeatureName::EdaDiff, Some(eda.diff));
    }
    out.set(FeatureName::TempAve, temp_feature(&segment.temp));
    if let Some(acc) = acc_features(&segment.acc) {
        out.set(FeatureName::AccAve, Some(acc.ave));
        out.set(FeatureName::AccMax, Some(acc.max));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedSegment {
    pub participant_id: String,
    pub period: Period,
    pub timestamp: f64,
    pub reason: QualityReason,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureExtraction {
    pub vectors: Vec<FeatureVector>,
    pub rejected: Vec<RejectedSegment>,
}

/// Extracts features for every segment in parallel, preserving input order.
/// Quality-rejected segments are collected rather than failing the batch.
pub fn extract_features(segments: &[LabeledSegment], config: &FeatureConfig) -> Result<FeatureExtraction> {
    let results: Vec<Result<FeatureVector>> =
        segments.par_iter().map(|s| extract_feature_vector(s, config)).collect();
    let mut out = FeatureExtraction::default();
    for (seg, res) in segments.iter().zip(results) {
        match res {
            Ok(v) => out.vectors.push(v),
            Err(Error::QualityRejected(reason)) => {
                log::warn!(
                    "{} {} segment at {} rejected: {reason:?}",
                    seg.participant_id,
                    seg.period,
                    seg.annotation_time
                );
                out.rejected.push(RejectedSegment {
                    participant_id: seg.participant_id.clone(),
                    period: seg.period,
                    timestamp: seg.annotation_time,
                    reason,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
