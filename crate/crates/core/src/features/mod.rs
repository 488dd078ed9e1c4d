//! The seventeen segment features: HRV time-domain, Poincaré and spectral
//! measures from BVP, plus EDA, skin-temperature and acceleration summaries.

mod channels;
mod extract;
mod hrv;
mod spectral;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{ArousalLabel, Period};

pub use channels::{acc_features, eda_features, temp_feature, AccFeatures, EdaFeatures};
pub use extract::{extract_feature_vector, extract_features, FeatureConfig, FeatureExtraction, RejectedSegment};
pub use hrv::{hrv_time_features, poincare_axes, HrvTimeFeatures, PoincareAxes};
pub use spectral::{hrv_freq_features, natural_cubic_spline, HrvFreqFeatures, SpectralConfig};
pub use table::{read_feature_table, write_feature_table, FEATURE_TABLE_HEADER};

/// Feature names in canonical table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureName {
    #[serde(rename = "SD")]
    Sd,
    #[serde(rename = "CV")]
    Cv,
    #[serde(rename = "RMSSD")]
    Rmssd,
    #[serde(rename = "pNN50")]
    Pnn50,
    #[serde(rename = "HR")]
    Hr,
    L,
    T,
    #[serde(rename = "LF")]
    Lf,
    #[serde(rename = "HF")]
    Hf,
    #[serde(rename = "LF_HF")]
    LfHf,
    #[serde(rename = "EDA_ave")]
    EdaAve,
    #[serde(rename = "EDA_max")]
    EdaMax,
    #[serde(rename = "EDA_min")]
    EdaMin,
    #[serde(rename = "EDA_diff")]
    EdaDiff,
    #[serde(rename = "Temp_ave")]
    TempAve,
    #[serde(rename = "Acc_ave")]
    AccAve,
    #[serde(rename = "Acc_max")]
    AccMax,
}

pub const FEATURE_COUNT: usize = 17;

impl FeatureName {
    pub const ALL: [FeatureName; FEATURE_COUNT] = [
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
        FeatureName::EdaAve,
        FeatureName::EdaMax,
        FeatureName::EdaMin,
        FeatureName::EdaDiff,
        FeatureName::TempAve,
        FeatureName::AccAve,
        FeatureName::AccMax,
    ];

    /// The five features used for the period-interaction model by default.
    pub const MODEL_DEFAULT: [FeatureName; 5] = [
        FeatureName::Hr,
        FeatureName::TempAve,
        FeatureName::AccAve,
        FeatureName::EdaMin,
        FeatureName::EdaMax,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureName::Sd => "SD",
            FeatureName::Cv => "CV",
            FeatureName::Rmssd => "RMSSD",
            FeatureName::Pnn50 => "pNN50",
            FeatureName::Hr => "HR",
            FeatureName::L => "L",
            FeatureName::T => "T",
            FeatureName::Lf => "LF",
            FeatureName::Hf => "HF",
            FeatureName::LfHf => "LF_HF",
            FeatureName::EdaAve => "EDA_ave",
            FeatureName::EdaMax => "EDA_max",
            FeatureName::EdaMin => "EDA_min",
            FeatureName::EdaDiff => "EDA_diff",
            FeatureName::TempAve => "Temp_ave",
            FeatureName::AccAve => "Acc_ave",
            FeatureName::AccMax => "Acc_max",
        }
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "LF/HF" {
            return Ok(FeatureName::LfHf);
        }
        FeatureName::ALL
            .into_iter()
            .find(|f| f.as_str() == t)
            .ok_or_else(|| Error::Validation(format!("unknown feature `{t}`")))
    }
}

/// Named feature values for one labeled segment; absent entries are missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub participant_id: String,
    pub period: Period,
    pub timestamp: f64,
    pub label: ArousalLabel,
    values: [Option<f64>; FEATURE_COUNT],
}

impl FeatureVector {
    pub fn new(participant_id: impl Into<String>, period: Period, timestamp: f64, label: ArousalLabel) -> Self {
        Self {
            participant_id: participant_id.into(),
            period,
            timestamp,
            label,
            values: [None; FEATURE_COUNT],
        }
    }

    pub fn get(&self, name: FeatureName) -> Option<f64> {
        self.values[name.index()]
    }

    /// Stores a value; non-finite values are recorded as missing.
    pub fn set(&mut self, name: FeatureName, value: Option<f64>) {
        self.values[name.index()] = value.filter(|v| v.is_finite());
    }

    pub fn with(mut self, name: FeatureName, value: f64) -> Self {
        self.set(name, Some(value));
        self
    }

    pub fn has_all(&self, names: &[FeatureName]) -> bool {
        names.iter().all(|n| self.get(*n).is_some())
    }

    /// Values of `names` in order, or `None` if any is missing.
    pub fn values_of(&self, names: &[FeatureName]) -> Option<Vec<f64>> {
        names.iter().map(|n| self.get(*n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in FeatureName::ALL {
            assert_eq!(f.as_str().parse::<FeatureName>().unwrap(), f);
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.as_str()));
        }
        assert_eq!("LF/HF".parse::<FeatureName>().unwrap(), FeatureName::LfHf);
        assert_eq!(FeatureName::ALL.iter().enumerate().filter(|(i, f)| f.index() == *i).count(), 17);
    }

    #[test]
    fn non_finite_is_missing() {
        let mut v = FeatureVector::new("A", Period::P1, 0.0, ArousalLabel::Low);
        v.set(FeatureName::LfHf, Some(f64::INFINITY));
        assert_eq!(v.get(FeatureName::LfHf), None);
        assert!(v.values_of(&[FeatureName::LfHf]).is_none());
    }
}
