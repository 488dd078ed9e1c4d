use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate, fit_ebm, Dataset, EbmConfig, EbmModel, Metrics};
use crate::error::{Error, Result};
use crate::features::FeatureName;
use crate::seed::derive_seed;
use crate::signal::Period;
use crate::stats::{mean, quantile_sorted};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub n_repeats: usize,
    pub n_per_period: usize,
    pub grid_points: usize,
    pub band_quantiles: (f64, f64),
    pub ebm: EbmConfig,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_repeats: 100,
            n_per_period: 90,
            grid_points: 64,
            band_quantiles: (0.025, 0.975),
            ebm: EbmConfig::default(),
            seed: 0,
        }
    }
}

/// Pointwise mean curve with a percentile band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub mean: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCurves {
    pub feature: FeatureName,
    pub grid: Vec<f64>,
    pub com: Band,
    /// `f_com + f_int`.
    pub total: Band,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatRecord {
    pub repeat: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub metrics: Option<Metrics>,
    pub fit_error: Option<String>,
    /// Per-feature curves on the common grid; not serialized.
    #[serde(skip)]
    pub com: Vec<Vec<f64>>,
    #[serde(skip)]
    pub total: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFit {
    pub features: Vec<FeatureName>,
    pub n_repeats: usize,
    /// A period had too few rows; it was used whole for training.
    pub degraded: bool,
    pub curves: Vec<FeatureCurves>,
    pub repeats: Vec<RepeatRecord>,
    pub config: EnsembleConfig,
}

impl EnsembleFit {
    pub fn successful_repeats(&self) -> impl Iterator<Item = &RepeatRecord> {
        self.repeats.iter().filter(|r| r.fit_error.is_none())
    }
}

pub fn equal_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect(),
    }
}

/// Per period: `n_per_period` training indices drawn without replacement
/// and the held-out remainder. A period with no more than `n_per_period`
/// rows trains on all of them and contributes no test rows.
pub(crate) fn split_period(rows: &[usize], n_per_period: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    if rows.len() <= n_per_period {
        return (rows.to_vec(), Vec::new());
    }
    let mut chosen = vec![false; rows.len()];
    for k in rand::seq::index::sample(rng, rows.len(), n_per_period) {
        chosen[k] = true;
    }
    let mut train = Vec::with_capacity(n_per_period);
    let mut test = Vec::with_capacity(rows.len() - n_per_period);
    for (k, &i) in rows.iter().enumerate() {
        if chosen[k] {
            train.push(i);
        } else {
            test.push(i);
        }
    }
    (train, test)
}

pub fn fit_ensemble(data: &Dataset, config: &EnsembleConfig) -> Result<EnsembleFit> {
    if data.is_empty() {
        return Err(Error::EmptyDataset("no rows for ensemble".into()));
    }
    if config.n_repeats == 0 {
        return Err(Error::Config("n_repeats must be at least 1".into()));
    }
    let d = data.features().len();
    let grids: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let (lo, hi) = data.range(j).expect("non-empty");
            equal_grid(lo, hi, config.grid_points)
        })
        .collect();
    let per_period: Vec<Vec<usize>> = [Period::P1, Period::P2].iter().map(|p| data.indices_of(*p)).collect();
    let degraded = per_period.iter().any(|rows| rows.len() <= config.n_per_period);
    if degraded {
        log::warn!("ensemble in degraded mode: a period has at most {} rows", config.n_per_period);
    }

    let repeats: Vec<RepeatRecord> = (0..config.n_repeats)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[r as u64, 0]));
            let mut train = Vec::new();
            let mut test = Vec::new();
            for rows in &per_period {
                let (a, b) = split_period(rows, config.n_per_period, &mut rng);
                train.extend(a);
                test.extend(b);
            }
            let ebm = EbmConfig {
                seed: derive_seed(config.seed, &[r as u64, 1]),
                ..config.ebm.clone()
            };
            let mut rec = RepeatRecord {
                repeat: r,
                train_size: train.len(),
                test_size: test.len(),
                metrics: None,
                fit_error: None,
                com: Vec::new(),
                total: Vec::new(),
            };
            match fit_ebm(&data.subset(&train), &ebm) {
                Ok(model) => {
                    if !test.is_empty() {
                        rec.metrics = evaluate(&model, &data.subset(&test)).ok();
                    }
                    record_curves(&model, &grids, &mut rec);
                }
                Err(e) => rec.fit_error = Some(e.to_string()),
            }
            rec
        })
        .collect();

    let ok: Vec<&RepeatRecord> = repeats.iter().filter(|r| r.fit_error.is_none()).collect();
    if ok.is_empty() {
        return Err(Error::Validation(format!(
            "every ensemble repeat failed: {}",
            repeats[0].fit_error.as_deref().unwrap_or("")
        )));
    }
    let curves = (0..d)
        .map(|j| FeatureCurves {
            feature: data.features()[j],
            grid: grids[j].clone(),
            com: band(ok.iter().map(|r| r.com[j].as_slice()), config.band_quantiles),
            total: band(ok.iter().map(|r| r.total[j].as_slice()), config.band_quantiles),
        })
        .collect();
    Ok(EnsembleFit {
        features: data.features().to_vec(),
        n_repeats: config.n_repeats,
        degraded,
        curves,
        repeats,
        config: config.clone(),
    })
}

fn record_curves(model: &EbmModel, grids: &[Vec<f64>], rec: &mut RepeatRecord) {
    for (j, grid) in grids.iter().enumerate() {
        rec.com.push(model.f_com[j].curve(grid));
        rec.total.push(model.total_curve(j, grid));
    }
}

/// Pointwise mean and percentile band. The band is widened where needed so
/// that it always contains the mean.
pub fn band<'a>(curves: impl Iterator<Item = &'a [f64]>, quantiles: (f64, f64)) -> Band {
    let curves: Vec<&[f64]> = curves.collect();
    let len = curves.first().map_or(0, |c| c.len());
    let mut out = Band {
        mean: Vec::with_capacity(len),
        lo: Vec::with_capacity(len),
        hi: Vec::with_capacity(len),
    };
    for k in 0..len {
        let mut col: Vec<f64> = curves.iter().map(|c| c[k]).collect();
        col.sort_by(f64::total_cmp);
        let m = mean(&col).expect("non-empty");
        out.mean.push(m);
        out.lo.push(quantile_sorted(&col, quantiles.0).expect("non-empty").min(m));
        out.hi.push(quantile_sorted(&col, quantiles.1).expect("non-empty").max(m));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::ArousalLabel;
    use rand::Rng;

    fn data(n_per_period: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ds = Dataset::new(vec![FeatureName::Hr, FeatureName::EdaMin]);
        for p in [Period::P1, Period::P2] {
            for _ in 0..n_per_period {
                let x: f64 = rng.gen_range(-1.0..1.0);
                let z: f64 = rng.gen_range(-1.0..1.0);
                let y = rng.gen_bool(crate::stats::sigmoid(3.0 * x));
                let l = if y { ArousalLabel::High } else { ArousalLabel::Low };
                ds.push_row(&[x, z], l, p).unwrap();
            }
        }
        ds
    }

    fn small_config(n_repeats: usize) -> EnsembleConfig {
        EnsembleConfig {
            n_repeats,
            ebm: EbmConfig {
                rounds: 40,
                ..EbmConfig::default()
            },
            seed: 4,
            ..EnsembleConfig::default()
        }
    }

    #[test]
    fn single_repeat_band_collapses() {
        let fit = fit_ensemble(&data(150, 1), &small_config(1)).unwrap();
        for c in &fit.curves {
            assert_eq!(c.grid.len(), 64);
            assert_eq!(c.com.lo, c.com.mean);
            assert_eq!(c.com.hi, c.com.mean);
        }
        assert!(!fit.degraded);
        let r = &fit.repeats[0];
        assert_eq!((r.train_size, r.test_size), (180, 120));
        assert!(r.metrics.is_some());
    }

    #[test]
    fn bands_contain_mean_and_runs_repeat() {
        let ds = data(120, 2);
        let cfg = small_config(12);
        let a = fit_ensemble(&ds, &cfg).unwrap();
        let b = fit_ensemble(&ds, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_repeats, 12);
        for c in &a.curves {
            for band in [&c.com, &c.total] {
                for k in 0..band.mean.len() {
                    assert!(band.lo[k] <= band.mean[k] && band.mean[k] <= band.hi[k]);
                }
            }
        }
    }

    #[test]
    fn small_period_is_degraded() {
        let fit = fit_ensemble(&data(50, 3), &small_config(2)).unwrap();
        assert!(fit.degraded);
        assert!(fit.repeats.iter().all(|r| r.test_size == 0 && r.metrics.is_none()));
    }

    #[test]
    fn split_is_disjoint_and_sized() {
        let rows: Vec<usize> = (10..110).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (train, test) = split_period(&rows, 90, &mut rng);
        assert_eq!((train.len(), test.len()), (90, 10));
        assert!(train.iter().all(|i| !test.contains(i)));
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(equal_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(equal_grid(2.0, 2.0, 2), vec![2.0, 2.0]);
    }
}
