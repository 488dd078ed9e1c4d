use serde::{Deserialize, Serialize};

use super::IbiSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QualityReason {
    Ok,
    TooFewBeats,
    IbiOutOfRangeExcess,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentQuality {
    pub accepted: bool,
    pub reason: QualityReason,
}

impl SegmentQuality {
    fn from_reason(reason: QualityReason) -> Self {
        Self {
            accepted: reason == QualityReason::Ok,
            reason,
        }
    }
}

/// Automated stand-in for visual rejection of noisy BVP segments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityConfig {
    /// Minimum detected beats per 50 s, scaled linearly with duration.
    pub min_beats_per_50s: f64,
    pub max_drop_fraction: f64,
}

impl Default for QualityConfig {
    fn default() -> Self {
        Self {
            min_beats_per_50s: 20.0,
            max_drop_fraction: 0.20,
        }
    }
}

pub fn assess_quality(ibi: &IbiSeries, duration_secs: f64, config: &QualityConfig) -> SegmentQuality {
    let min_beats = config.min_beats_per_50s * duration_secs / 50.0;
    let reason = if (ibi.beat_count() as f64) < min_beats || ibi.insufficient_beats() {
        QualityReason::TooFewBeats
    } else if ibi.drop_fraction() > config.max_drop_fraction {
        QualityReason::IbiOutOfRangeExcess
    } else {
        QualityReason::Ok
    };
    SegmentQuality::from_reason(reason)
}

/// Sample ranges of overlapping windows: starts at 0, stride, 2*stride, ...
/// while the window fits inside `len` samples.
pub fn window_ranges(len: usize, rate: f64, window_secs: f64, stride_secs: f64) -> Result<Vec<std::ops::Range<usize>>> {
    let window = (window_secs * rate).round() as usize;
    let stride = ((stride_secs * rate).round() as usize).max(1);
    if window == 0 {
        return Err(Error::Validation("window must span at least one sample".into()));
    }
    if len < window {
        return Err(Error::SegmentShorterThanWindow { len, window });
    }
    Ok((0..=(len - window) / stride).map(|k| k * stride..k * stride + window).collect())
}

pub fn window_slices<T>(samples: &[T], rate: f64, window_secs: f64, stride_secs: f64) -> Result<Vec<&[T]>> {
    Ok(window_ranges(samples.len(), rate, window_secs, stride_secs)?
        .into_iter()
        .map(|r| &samples[r])
        .collect())
}
