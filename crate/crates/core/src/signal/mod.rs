//! Wearable recording data model: channels, annotations, sessions and the
//! labeled segments paired with each annotation.

mod channel;
mod segment;
mod session;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use channel::{parse_channel_csv, parse_channel_csv_with, write_channel_csv, ACC_UNITS_PER_G};
pub use segment::{
    extract_labeled_segments, extract_labeled_segments_detailed, LabeledSegment, SegmentTiming,
    SkipReason, SkippedAnnotation,
};
pub use session::{
    discover_sessions, load_session, parse_annotations_csv, write_annotations_csv, write_session,
    SessionManifest,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ChannelKind {
    Bvp,
    Eda,
    Temp,
    Acc,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [ChannelKind::Bvp, ChannelKind::Eda, ChannelKind::Temp, ChannelKind::Acc];

    /// Native E4 sampling rate in Hz.
    pub fn nominal_rate(self) -> f64 {
        match self {
            ChannelKind::Bvp => 64.0,
            ChannelKind::Eda | ChannelKind::Temp => 4.0,
            ChannelKind::Acc => 32.0,
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            ChannelKind::Bvp => "BVP.csv",
            ChannelKind::Eda => "EDA.csv",
            ChannelKind::Temp => "TEMP.csv",
            ChannelKind::Acc => "ACC.csv",
        }
    }

    pub fn is_vector(self) -> bool {
        matches!(self, ChannelKind::Acc)
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ChannelKind::Bvp => "BVP",
            ChannelKind::Eda => "EDA",
            ChannelKind::Temp => "TEMP",
            ChannelKind::Acc => "ACC",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Samples {
    Scalar(Vec<f64>),
    /// Tri-axial samples in g.
    Vector(Vec<[f64; 3]>),
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::Scalar(v) => v.len(),
            Samples::Vector(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_scalar(&self) -> Option<&[f64]> {
        match self {
            Samples::Scalar(v) => Some(v),
            Samples::Vector(_) => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[[f64; 3]]> {
        match self {
            Samples::Vector(v) => Some(v),
            Samples::Scalar(_) => None,
        }
    }
}

/// One uniformly sampled sensor stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledChannel {
    kind: ChannelKind,
    start_time: f64,
    rate: f64,
    samples: Samples,
}

impl SampledChannel {
    pub fn new(kind: ChannelKind, start_time: f64, rate: f64, samples: Samples) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::Validation(format!("{kind} sample rate must be positive, got {rate}")));
        }
        if !start_time.is_finite() {
            return Err(Error::Validation(format!("{kind} start time is not finite")));
        }
        if samples.is_empty() {
            return Err(Error::Validation(format!("{kind} channel has no samples")));
        }
        if kind.is_vector() != matches!(samples, Samples::Vector(_)) {
            return Err(Error::Validation(format!("{kind} sample arity does not match channel kind")));
        }
        Ok(Self { kind, start_time, rate, samples })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Epoch time just past the last sample.
    pub fn end_time(&self) -> f64 {
        self.start_time + self.len() as f64 / self.rate
    }

    /// Set when the rate differs from the device's native rate for this kind.
    pub fn nonstandard_rate(&self) -> bool {
        (self.rate - self.kind.nominal_rate()).abs() > 1e-9
    }

    /// Sample index range covering `[from, to)` in epoch seconds, using floor
    /// rounding on both edges. `None` when the range leaves the recording.
    pub fn index_range(&self, from: f64, to: f64) -> Option<std::ops::Range<usize>> {
        let start = ((from - self.start_time) * self.rate).floor();
        let end = ((to - self.start_time) * self.rate).floor();
        if start < 0.0 || end > self.len() as f64 || end < start {
            return None;
        }
        Some(start as usize..end as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EmotionCategory {
    Happy,
    Nervous,
    Sad,
    Relaxed,
}

impl EmotionCategory {
    pub const ALL: [EmotionCategory; 4] = [
        EmotionCategory::Happy,
        EmotionCategory::Nervous,
        EmotionCategory::Sad,
        EmotionCategory::Relaxed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EmotionCategory::Happy => "Happy",
            EmotionCategory::Nervous => "Nervous",
            EmotionCategory::Sad => "Sad",
            EmotionCategory::Relaxed => "Relaxed",
        }
    }
}

impl fmt::Display for EmotionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmotionCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        EmotionCategory::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnmappedCategory(t.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionAnnotation {
    pub timestamp: f64,
    pub category: EmotionCategory,
    pub sublabel: Option<String>,
}

/// Binary arousal: 0 = low, 1 = high.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum ArousalLabel {
    Low = 0,
    High = 1,
}

impl ArousalLabel {
    pub fn value(self) -> u8 {
        self as u8
    }
}

impl From<ArousalLabel> for u8 {
    fn from(l: ArousalLabel) -> u8 {
        l.value()
    }
}

impl TryFrom<u8> for ArousalLabel {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(ArousalLabel::Low),
            1 => Ok(ArousalLabel::High),
            other => Err(Error::Validation(format!("arousal label must be 0 or 1, got {other}"))),
        }
    }
}

/// Category to arousal lookup table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArousalMapping(BTreeMap<EmotionCategory, ArousalLabel>);

impl Default for ArousalMapping {
    /// Quadrant positions on the core affect circumplex: Happy and Nervous
    /// are activated, Sad and Relaxed deactivated.
    fn default() -> Self {
        Self(BTreeMap::from([
            (EmotionCategory::Happy, ArousalLabel::High),
            (EmotionCategory::Nervous, ArousalLabel::High),
            (EmotionCategory::Sad, ArousalLabel::Low),
            (EmotionCategory::Relaxed, ArousalLabel::Low),
        ]))
    }
}

impl ArousalMapping {
    pub fn new(entries: impl IntoIterator<Item = (EmotionCategory, ArousalLabel)>) -> Self {
        Self(entries.into_iter().collect())
    }

    pub fn with(mut self, category: EmotionCategory, label: ArousalLabel) -> Self {
        self.0.insert(category, label);
        self
    }

    pub fn is_total(&self) -> bool {
        EmotionCategory::ALL.iter().all(|c| self.0.contains_key(c))
    }
}

pub fn map_arousal(category: EmotionCategory, mapping: &ArousalMapping) -> Result<ArousalLabel> {
    mapping
        .0
        .get(&category)
        .copied()
        .ok_or_else(|| Error::UnmappedCategory(category.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Period {
    P1,
    P2,
}

impl Period {
    /// Period dummy: 0 for the first collection period, 1 for the second.
    pub fn delta(self) -> f64 {
        match self {
            Period::P1 => 0.0,
            Period::P2 => 1.0,
        }
    }

    pub fn is_second(self) -> bool {
        matches!(self, Period::P2)
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Period::P1 => "P1",
            Period::P2 => "P2",
        })
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "P1" | "p1" | "1" => Ok(Period::P1),
            "P2" | "p2" | "2" => Ok(Period::P2),
            other => Err(Error::Validation(format!("unknown period `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordingSession {
    pub participant_id: String,
    pub period: Period,
    pub bvp: SampledChannel,
    pub eda: SampledChannel,
    pub temp: SampledChannel,
    pub acc: SampledChannel,
    pub annotations: Vec<EmotionAnnotation>,
}

impl RecordingSession {
    pub fn new(
        participant_id: impl Into<String>,
        period: Period,
        channels: [SampledChannel; 4],
        mut annotations: Vec<EmotionAnnotation>,
    ) -> Result<Self> {
        let [bvp, eda, temp, acc] = channels;
        for (ch, kind) in [(&bvp, ChannelKind::Bvp), (&eda, ChannelKind::Eda), (&temp, ChannelKind::Temp), (&acc, ChannelKind::Acc)] {
            if ch.kind() != kind {
                return Err(Error::Validation(format!("expected {kind} channel, got {}", ch.kind())));
            }
        }
        annotations.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
        Ok(Self {
            participant_id: participant_id.into(),
            period,
            bvp,
            eda,
            temp,
            acc,
            annotations,
        })
    }

    pub fn channel(&self, kind: ChannelKind) -> &SampledChannel {
        match kind {
            ChannelKind::Bvp => &self.bvp,
            ChannelKind::Eda => &self.eda,
            ChannelKind::Temp => &self.temp,
            ChannelKind::Acc => &self.acc,
        }
    }

    /// Non-fatal problems: nonstandard rates, annotations outside the
    /// recording span, channels that do not cover the annotation span.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for kind in ChannelKind::ALL {
            let ch = self.channel(kind);
            if ch.nonstandard_rate() {
                out.push(format!("{kind} rate {} Hz differs from nominal {} Hz", ch.rate(), kind.nominal_rate()));
            }
        }
        let span_start = ChannelKind::ALL.iter().map(|k| self.channel(*k).start_time()).fold(f64::NEG_INFINITY, f64::max);
        let span_end = ChannelKind::ALL.iter().map(|k| self.channel(*k).end_time()).fold(f64::INFINITY, f64::min);
        for a in &self.annotations {
            if a.timestamp < span_start || a.timestamp > span_end {
                out.push(format!("annotation at {} lies outside the common recording span", a.timestamp));
            }
        }
        out
    }
}
