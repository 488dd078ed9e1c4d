//! BVP filtering, beat and IBI extraction, segment quality gating,
//! windowing, and per-participant outlier removal.

mod beats;
mod filter;
mod outliers;
mod quality;

pub use beats::{beats_to_ibi, detect_beats, BeatDetectorConfig, IbiRange, IbiSeries};
pub use filter::{design_butterworth_lowpass, filter_zero_phase, FilterCoefficients};
pub use outliers::{remove_outliers_3sigma, remove_outliers_sigma, write_outlier_log, OutlierRecord, OutlierRemoval};
pub use quality::{assess_quality, window_ranges, window_slices, QualityConfig, QualityReason, SegmentQuality};
