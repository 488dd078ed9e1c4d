use crate::error::{Error, Result};
use crate::features::{FeatureName, FeatureVector};
use crate::signal::{ArousalLabel, Period};

/// Column-major design matrix over a fixed feature list. Only rows with every
/// listed feature present are admitted.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<FeatureName>,
    columns: Vec<Vec<f64>>,
    labels: Vec<u8>,
    periods: Vec<Period>,
}

impl Dataset {
    pub fn new(features: Vec<FeatureName>) -> Self {
        let columns = vec![Vec::new(); features.len()];
        Self {
            features,
            columns,
            labels: Vec::new(),
            periods: Vec::new(),
        }
    }

    /// Builds a dataset from feature vectors, skipping rows that miss any of
    /// `features`. Returns the dataset and the number of skipped rows.
    pub fn from_vectors(rows: &[FeatureVector], features: &[FeatureName]) -> (Self, usize) {
        let mut ds = Self::new(features.to_vec());
        let mut skipped = 0;
        for r in rows {
            match r.values_of(features) {
                Some(values) => ds.push_row(&values, r.label, r.period).expect("arity matches"),
                None => skipped += 1,
            }
        }
        (ds, skipped)
    }

    pub fn push_row(&mut self, values: &[f64], label: ArousalLabel, period: Period) -> Result<()> {
        if values.len() != self.features.len() {
            return Err(Error::Validation(format!(
                "row has {} values for {} features",
                values.len(),
                self.features.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::MissingFeature(self.features[i].to_string()));
        }
        for (col, v) in self.columns.iter_mut().zip(values) {
            col.push(*v);
        }
        self.labels.push(label.value());
        self.periods.push(period);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> &[FeatureName] {
        &self.features
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn periods(&self) -> &[Period] {
        &self.periods
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn indices_of(&self, period: Period) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.periods[i] == period).collect()
    }

    pub fn has_both_classes(&self) -> bool {
        self.labels.contains(&0) && self.labels.contains(&1)
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            features: self.features.clone(),
            columns: self.columns.iter().map(|c| idx.iter().map(|&i| c[i]).collect()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            periods: idx.iter().map(|&i| self.periods[i]).collect(),
        }
    }

    /// Same rows restricted to the given feature columns, in the given order.
    pub fn select_features(&self, features: &[FeatureName]) -> Result<Self> {
        let mut columns = Vec::with_capacity(features.len());
        for f in features {
            let j = self
                .features
                .iter()
                .position(|g| g == f)
                .ok_or_else(|| Error::MissingFeature(f.to_string()))?;
            columns.push(self.columns[j].clone());
        }
        Ok(Self {
            features: features.to_vec(),
            columns,
            labels: self.labels.clone(),
            periods: self.periods.clone(),
        })
    }

    /// Observed `(min, max)` of column `j`.
    pub fn range(&self, j: usize) -> Option<(f64, f64)> {
        let c = &self.columns[j];
        if c.is_empty() {
            return None;
        }
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    }
}
