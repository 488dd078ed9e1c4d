use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ebm::{evaluate, fit_ebm, split_period, Dataset, EbmConfig, Metrics};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::signal::Period;
use crate::stats::{mean, sample_sd};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CasesConfig {
    pub n_repeats: usize,
    pub n_per_period: usize,
    pub ebm: EbmConfig,
    pub seed: u64,
}

impl Default for CasesConfig {
    fn default() -> Self {
        Self {
            n_repeats: 100,
            n_per_period: 90,
            ebm: EbmConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Case {
    /// Train period 1, test period 1.
    #[serde(rename = "a")]
    A,
    /// Train period 1, test period 2.
    #[serde(rename = "b")]
    B,
    /// Train period 2, test period 2.
    #[serde(rename = "c")]
    C,
    /// Train both periods, test period 2.
    #[serde(rename = "d")]
    D,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::A, Case::B, Case::C, Case::D];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: Case,
    pub accuracy: f64,
    pub accuracy_se: f64,
    /// Over repeats whose test set held both classes.
    pub auc: Option<f64>,
    pub auc_se: Option<f64>,
    pub n_repeats: usize,
    pub n_auc: usize,
    pub mean_test_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseTable {
    pub cases: Vec<CaseResult>,
}

impl CaseTable {
    pub fn get(&self, case: Case) -> &CaseResult {
        self.cases.iter().find(|c| c.case == case).expect("all cases present")
    }
}

#[derive(Debug, Clone, Default)]
struct RepeatOutcome {
    metrics: [Option<Metrics>; 4],
}

/// Runs the four train/test combinations over `n_repeats` random splits.
/// Cases (a)-(c) train on one period with the interaction-free model; case
/// (d) trains the full model on both periods. Cases (a) and (b) share the
/// fitted model of each repeat.
pub fn cross_period_cases(data: &Dataset, config: &CasesConfig) -> Result<CaseTable> {
    let p1 = data.indices_of(Period::P1);
    let p2 = data.indices_of(Period::P2);
    for (p, rows) in [(Period::P1, &p1), (Period::P2, &p2)] {
        if rows.len() <= config.n_per_period {
            return Err(Error::Validation(format!(
                "{p} has {} rows; cross-period cases need more than {}",
                rows.len(),
                config.n_per_period
            )));
        }
    }
    if config.n_repeats == 0 {
        return Err(Error::Config("n_repeats must be at least 1".into()));
    }

    let outcomes: Vec<Result<RepeatOutcome>> = (0..config.n_repeats)
        .into_par_iter()
        .map(|r| run_repeat(data, &p1, &p2, config, r as u64))
        .collect();
    let outcomes: Vec<RepeatOutcome> = outcomes.into_iter().collect::<Result<_>>()?;

    let cases = Case::ALL
        .iter()
        .enumerate()
        .map(|(k, case)| summarize(*case, outcomes.iter().filter_map(|o| o.metrics[k])))
        .collect::<Result<_>>()?;
    Ok(CaseTable { cases })
}

fn run_repeat(data: &Dataset, p1: &[usize], p2: &[usize], config: &CasesConfig, r: u64) -> Result<RepeatOutcome> {
    let single = EbmConfig {
        interactions: false,
        ..config.ebm.clone()
    };
    let mut out = RepeatOutcome::default();
    let fit_eval = |train: &[usize], tests: &[&[usize]], cfg: &EbmConfig, slot: u64| -> Result<Vec<Option<Metrics>>> {
        assert_disjoint(train, tests);
        let cfg = EbmConfig {
            seed: derive_seed(config.seed, &[r, slot, 1]),
            ..cfg.clone()
        };
        let model = match fit_ebm(&data.subset(train), &cfg) {
            Ok(m) => m,
            // A training draw holding one class leaves this repeat unscored.
            Err(Error::SingleClass) => return Ok(vec![None; tests.len()]),
            Err(e) => return Err(e),
        };
        tests.iter().map(|t| evaluate(&model, &data.subset(t)).map(Some)).collect()
    };
    let rng = |slot: u64| ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[r, slot, 0]));

    let (train1, rest1) = split_period(p1, config.n_per_period, &mut rng(0));
    let ab = fit_eval(&train1, &[&rest1, p2], &single, 0)?;
    out.metrics[0] = ab[0];
    out.metrics[1] = ab[1];

    let (train2, rest2) = split_period(p2, config.n_per_period, &mut rng(1));
    out.metrics[2] = fit_eval(&train2, &[&rest2], &single, 1)?[0];

    let mut r3 = rng(2);
    let (mut train_d, _) = split_period(p1, config.n_per_period, &mut r3);
    let (train_d2, test_d) = split_period(p2, config.n_per_period, &mut r3);
    train_d.extend(train_d2);
    out.metrics[3] = fit_eval(&train_d, &[&test_d], &config.ebm, 2)?[0];
    Ok(out)
}

fn assert_disjoint(train: &[usize], tests: &[&[usize]]) {
    let mut seen = std::collections::HashSet::with_capacity(train.len());
    seen.extend(train.iter().copied());
    for t in tests {
        assert!(t.iter().all(|i| !seen.contains(i)), "train and test rows overlap");
    }
}

fn summarize(case: Case, metrics: impl Iterator<Item = Metrics>) -> Result<CaseResult> {
    let metrics: Vec<Metrics> = metrics.collect();
    if metrics.is_empty() {
        return Err(Error::Validation(format!("no scored repeats for case {case:?}")));
    }
    let acc: Vec<f64> = metrics.iter().map(|m| m.accuracy).collect();
    let aucs: Vec<f64> = metrics.iter().filter_map(|m| m.auc).collect();
    let se = |v: &[f64]| sample_sd(v).map_or(0.0, |sd| sd / (v.len() as f64).sqrt());
    Ok(CaseResult {
        case,
        accuracy: mean(&acc).expect("non-empty"),
        accuracy_se: se(&acc),
        auc: mean(&aucs),
        auc_se: (!aucs.is_empty()).then(|| se(&aucs)),
        n_repeats: metrics.len(),
        n_auc: aucs.len(),
        mean_test_size: metrics.iter().map(|m| m.n as f64).sum::<f64>() / metrics.len() as f64,
    })
}
