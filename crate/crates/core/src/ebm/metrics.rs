use serde::{Deserialize, Serialize};

use super::{Dataset, EbmModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    /// Missing when the test set holds a single class.
    pub auc: Option<f64>,
    pub n: usize,
}

pub fn evaluate(model: &EbmModel, test: &Dataset) -> Result<Metrics> {
    if test.is_empty() {
        return Err(Error::EmptyDataset("empty test set".into()));
    }
    let data = test.select_features(&model.features)?;
    let probas: Vec<f64> = (0..data.len())
        .map(|i| model.predict_proba(&data.row(i), data.periods()[i]))
        .collect::<Result<_>>()?;
    Ok(Metrics {
        accuracy: accuracy(&probas, data.labels()),
        auc: auc(&probas, data.labels()),
        n: data.len(),
    })
}

/// Fraction of rows where `proba >= 0.5` agrees with the label.
pub fn accuracy(probas: &[f64], labels: &[u8]) -> f64 {
    let hits = probas.iter().zip(labels).filter(|(p, y)| (**p >= 0.5) == (**y == 1)).count();
    hits as f64 / probas.len() as f64
}

/// Mann-Whitney AUC with average ranks, so ties count one half.
pub fn auc(scores: &[f64], labels: &[u8]) -> Option<f64> {
    let n_pos = labels.iter().filter(|y| **y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1 ..= j+1 share their average.
        let avg = (i + j + 2) as f64 / 2.0;
        rank_sum_pos += avg * order[i..=j].iter().filter(|&&k| labels[k] == 1).count() as f64;
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos * n_neg) as f64)
}
