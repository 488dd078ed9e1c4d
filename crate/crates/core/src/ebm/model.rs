use serde::{Deserialize, Serialize};

use super::BinSpec;
use crate::error::{Error, Result};
use crate::features::{FeatureName, FeatureVector};
use crate::signal::Period;
use crate::stats::sigmoid;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EbmConfig {
    pub rounds: usize,
    pub learning_rate: f64,
    pub max_bins: usize,
    /// Bootstrap bags averaged per term update; 0 uses the full sample once.
    pub inner_bags: usize,
    /// Fit the period-2 interaction shapes.
    pub interactions: bool,
    /// Leaves per term update; a value of at least `max_bins` gives every
    /// bin its own step.
    pub max_leaves: usize,
    /// Minimum (bag-weighted) rows in a leaf.
    pub min_samples_leaf: usize,
    /// Ridge penalty in the leaf Newton step.
    pub l2: f64,
    pub seed: u64,
}

impl Default for EbmConfig {
    fn default() -> Self {
        Self {
            rounds: 500,
            learning_rate: 0.1,
            max_bins: 32,
            inner_bags: 8,
            interactions: true,
            max_leaves: 3,
            min_samples_leaf: 2,
            l2: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeFunction {
    pub bins: BinSpec,
    pub values: Vec<f64>,
}

impl ShapeFunction {
    pub fn zero(bins: BinSpec) -> Self {
        let values = vec![0.0; bins.bin_count()];
        Self { bins, values }
    }

    pub fn feature(&self) -> FeatureName {
        self.bins.feature
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.values[self.bins.bin_of(x)]
    }

    pub fn curve(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&x| self.eval(x)).collect()
    }
}

/// Additive logistic model
/// `logit = intercept + Σ f_com(x) + δ_p · (period2_offset + Σ f_int(x))`.
/// The period-2 offset carries the mass removed when centering `f_int` over
/// period-2 rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EbmModel {
    pub format_version: u32,
    pub features: Vec<FeatureName>,
    pub intercept: f64,
    pub period2_offset: f64,
    pub f_com: Vec<ShapeFunction>,
    /// Empty when interactions are disabled.
    pub f_int: Vec<ShapeFunction>,
    pub config: EbmConfig,
}

impl EbmModel {
    pub fn intercept_only(features: Vec<FeatureName>, intercept: f64, config: EbmConfig) -> Self {
        let f_com = features.iter().map(|f| ShapeFunction::zero(BinSpec::single(*f))).collect();
        Self {
            format_version: MODEL_FORMAT_VERSION,
            features,
            intercept,
            period2_offset: 0.0,
            f_com,
            f_int: Vec::new(),
            config,
        }
    }

    pub fn has_interactions(&self) -> bool {
        !self.f_int.is_empty()
    }

    pub fn predict_logit(&self, x: &[f64], period: Period) -> Result<f64> {
        if x.len() != self.features.len() {
            return Err(Error::Validation(format!(
                "expected {} feature values, got {}",
                self.features.len(),
                x.len()
            )));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::MissingFeature(self.features[i].to_string()));
        }
        let mut s = self.intercept;
        for (f, v) in self.f_com.iter().zip(x) {
            s += f.eval(*v);
        }
        if period.is_second() && self.has_interactions() {
            s += self.period2_offset;
            for (f, v) in self.f_int.iter().zip(x) {
                s += f.eval(*v);
            }
        }
        Ok(s)
    }

    pub fn predict_proba(&self, x: &[f64], period: Period) -> Result<f64> {
        self.predict_logit(x, period).map(sigmoid)
    }

    pub fn predict_vector(&self, v: &FeatureVector) -> Result<f64> {
        let x: Vec<f64> = self
            .features
            .iter()
            .map(|f| v.get(*f).ok_or_else(|| Error::MissingFeature(f.to_string())))
            .collect::<Result<_>>()?;
        self.predict_proba(&x, v.period)
    }

    /// Shape of `f_com + f_int` for feature `j` on a grid (period-2 total
    /// contribution, offset excluded).
    pub fn total_curve(&self, j: usize, grid: &[f64]) -> Vec<f64> {
        let com = self.f_com[j].curve(grid);
        match self.f_int.get(j) {
            Some(int) => com.iter().zip(int.curve(grid)).map(|(a, b)| a + b).collect(),
            None => com,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported model format version {}",
                self.format_version
            )));
        }
        if self.f_com.len() != self.features.len()
            || !(self.f_int.is_empty() || self.f_int.len() == self.features.len())
        {
            return Err(Error::Validation("shape count does not match feature list".into()));
        }
        for (i, s) in self.f_com.iter().chain(&self.f_int).enumerate() {
            let j = i % self.features.len();
            if s.feature() != self.features[j] {
                return Err(Error::Validation(format!("shape {i} is for the wrong feature")));
            }
            if s.values.len() != s.bins.bin_count() || s.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("shape for {} is malformed", s.feature())));
            }
            if s.bins.cuts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Validation(format!("cuts for {} are not increasing", s.feature())));
            }
        }
        if !self.intercept.is_finite() || !self.period2_offset.is_finite() {
            return Err(Error::Validation("non-finite intercept".into()));
        }
        Ok(())
    }
}
