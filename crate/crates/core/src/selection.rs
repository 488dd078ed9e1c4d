//! Greedy sequential forward feature selection scored by stratified k-fold
//! cross-validated accuracy of an interaction-free EBM.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ebm::{evaluate, fit_ebm, Dataset, EbmConfig};
use crate::error::{Error, Result};
use crate::features::{FeatureName, FeatureVector, FEATURE_COUNT};
use crate::seed::derive_seed;
use crate::stats::mean;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    pub k: usize,
    pub folds: usize,
    pub seed: u64,
    pub ebm: EbmConfig,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            k: 5,
            folds: 5,
            seed: 0,
            ebm: EbmConfig {
                rounds: 100,
                inner_bags: 0,
                interactions: false,
                ..EbmConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub feature: FeatureName,
    pub cv_accuracy: f64,
    /// Rows usable for the winning candidate set.
    pub n_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: Vec<FeatureName>,
    pub trajectory: Vec<SelectionStep>,
    pub config: SelectionConfig,
}

/// Assigns every row to a fold, stratified by label: each class is shuffled
/// and dealt round-robin.
fn assign_folds(labels: &[u8], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0]));
    let mut out = vec![0; labels.len()];
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for (k, i) in idx.into_iter().enumerate() {
            out[i] = k % folds;
        }
    }
    out
}

pub fn sequential_forward_select(rows: &[FeatureVector], config: &SelectionConfig) -> Result<SelectionResult> {
    if config.k > FEATURE_COUNT {
        return Err(Error::Config(format!("k = {} exceeds {FEATURE_COUNT} features", config.k)));
    }
    if config.folds < 2 {
        return Err(Error::Config("folds must be at least 2".into()));
    }
    let labels: Vec<u8> = rows.iter().map(|r| r.label.value()).collect();
    if !(labels.contains(&0) && labels.contains(&1)) {
        return Err(Error::SingleClass);
    }
    let fold_of = assign_folds(&labels, config.folds, config.seed);

    let mut selected: Vec<FeatureName> = Vec::new();
    let mut trajectory = Vec::new();
    while selected.len() < config.k {
        let candidates: Vec<FeatureName> = FeatureName::ALL.into_iter().filter(|f| !selected.contains(f)).collect();
        let scores: Vec<Option<(f64, usize)>> = candidates
            .par_iter()
            .map(|c| {
                let mut set = selected.clone();
                set.push(*c);
                cv_accuracy(rows, &fold_of, &set, config, selected.len() as u64)
            })
            .collect::<Result<_>>()?;
        // Strict improvement keeps the earliest canonical feature on ties.
        let mut best: Option<(usize, f64, usize)> = None;
        for (k, s) in scores.iter().enumerate() {
            if let Some((acc, n)) = *s {
                if best.map_or(true, |b| acc > b.1) {
                    best = Some((k, acc, n));
                }
            }
        }
        let Some((k, acc, n)) = best else {
            log::warn!("selection stopped early: no candidate could be scored");
            break;
        };
        selected.push(candidates[k]);
        trajectory.push(SelectionStep {
            feature: candidates[k],
            cv_accuracy: acc,
            n_rows: n,
        });
    }
    Ok(SelectionResult {
        selected,
        trajectory,
        config: config.clone(),
    })
}

/// Mean held-out accuracy over folds using only rows that have every
/// feature in `set`. `None` when some fold cannot be trained or tested.
fn cv_accuracy(
    rows: &[FeatureVector],
    fold_of: &[usize],
    set: &[FeatureName],
    config: &SelectionConfig,
    step: u64,
) -> Result<Option<(f64, usize)>> {
    let mut data = Dataset::new(set.to_vec());
    let mut folds = Vec::new();
    for (r, &f) in rows.iter().zip(fold_of) {
        if let Some(values) = r.values_of(set) {
            data.push_row(&values, r.label, r.period)?;
            folds.push(f);
        }
    }
    let mut accs = Vec::with_capacity(config.folds);
    for fold in 0..config.folds {
        let (test, train): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| folds[i] == fold);
        if test.is_empty() {
            return Ok(None);
        }
        let ebm = EbmConfig {
            interactions: false,
            seed: derive_seed(config.seed, &[1, step, fold as u64]),
            ..config.ebm.clone()
        };
        let model = match fit_ebm(&data.subset(&train), &ebm) {
            Ok(m) => m,
            Err(Error::SingleClass | Error::EmptyDataset(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        accs.push(evaluate(&model, &data.subset(&test))?.accuracy);
    }
    Ok(mean(&accs).map(|a| (a, data.len())))
}

pub fn selection_to_json(result: &SelectionResult, config_hash: Option<&str>) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        config_hash: Option<&'a str>,
        #[serde(flatten)]
        result: &'a SelectionResult,
    }
    serde_json::to_string_pretty(&Doc { config_hash, result }).expect("serializable")
}
