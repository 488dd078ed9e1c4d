use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bin_feature, BinSpec, Dataset, EbmConfig, EbmModel, ShapeFunction, MODEL_FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::signal::Period;
use crate::stats::{logistic_loss, sigmoid};

const MAX_HALVINGS: usize = 8;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitTrace {
    /// Mean training logistic loss; entry 0 is the intercept-only loss and
    /// entry `r` the loss after round `r`.
    pub loss_history: Vec<f64>,
}

pub fn fit_ebm(data: &Dataset, config: &EbmConfig) -> Result<EbmModel> {
    fit_ebm_traced(data, config).map(|(m, _)| m)
}

struct Term {
    feature: usize,
    interaction: bool,
}

pub fn fit_ebm_traced(data: &Dataset, config: &EbmConfig) -> Result<(EbmModel, FitTrace)> {
    validate(data, config)?;
    let n = data.len();
    let d = data.features().len();
    let labels = data.labels();

    let specs: Vec<BinSpec> = (0..d)
        .map(|j| bin_feature(data.features()[j], data.column(j), config.max_bins))
        .collect();
    let bin_idx: Vec<Vec<u16>> = (0..d)
        .map(|j| data.column(j).iter().map(|&x| specs[j].bin_of(x) as u16).collect())
        .collect();
    let all_rows: Vec<usize> = (0..n).collect();
    let p2_rows = data.indices_of(Period::P2);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bags: Vec<Vec<u32>> = (0..config.inner_bags)
        .map(|_| {
            let mut w = vec![0u32; n];
            for _ in 0..n {
                w[rng.gen_range(0..n)] += 1;
            }
            w
        })
        .collect();

    let positives = labels.iter().filter(|&&y| y == 1).count() as f64;
    let base = positives / n as f64;
    let intercept = (base / (1.0 - base)).ln();
    let mut scores = vec![intercept; n];

    let mut terms: Vec<Term> = (0..d).map(|j| Term { feature: j, interaction: false }).collect();
    if config.interactions {
        terms.extend((0..d).map(|j| Term { feature: j, interaction: true }));
    }
    let mut com: Vec<Vec<f64>> = specs.iter().map(|s| vec![0.0; s.bin_count()]).collect();
    let mut int: Vec<Vec<f64>> = com.clone();

    let mean_loss = |scores: &[f64]| scores.iter().zip(labels).map(|(s, y)| logistic_loss(*s, *y)).sum::<f64>() / n as f64;
    let mut trace = FitTrace {
        loss_history: vec![mean_loss(&scores)],
    };

    for _ in 0..config.rounds {
        for term in &terms {
            let j = term.feature;
            let nb = specs[j].bin_count();
            if nb == 1 {
                continue;
            }
            let rows = if term.interaction { &p2_rows } else { &all_rows };
            let values = if term.interaction { &mut int[j] } else { &mut com[j] };
            let delta = term_step(rows, &bin_idx[j], labels, &scores, values, &bags, config);
            for (v, dv) in values.iter_mut().zip(&delta) {
                *v += dv;
            }
            for &i in rows {
                scores[i] += delta[bin_idx[j][i] as usize];
            }
        }
        trace.loss_history.push(mean_loss(&scores));
    }

    // Move each shape's mean into the intercept (or the period-2 offset) so
    // shapes are centered and predictions are unchanged.
    let mut model = EbmModel {
        format_version: MODEL_FORMAT_VERSION,
        features: data.features().to_vec(),
        intercept,
        period2_offset: 0.0,
        f_com: Vec::with_capacity(d),
        f_int: Vec::new(),
        config: config.clone(),
    };
    for j in 0..d {
        let m = weighted_mean(&com[j], &bin_idx[j], &all_rows);
        model.intercept += m;
        model.f_com.push(centered(&specs[j], &com[j], m));
    }
    if config.interactions {
        for j in 0..d {
            let m = weighted_mean(&int[j], &bin_idx[j], &p2_rows);
            model.period2_offset += m;
            model.f_int.push(centered(&specs[j], &int[j], m));
        }
    }
    Ok((model, trace))
}

fn validate(data: &Dataset, config: &EbmConfig) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyDataset("no training rows".into()));
    }
    if !data.has_both_classes() {
        return Err(Error::SingleClass);
    }
    if config.interactions {
        for p in [Period::P1, Period::P2] {
            if data.indices_of(p).len() < 2 {
                return Err(Error::Validation(format!("interactions need at least 2 rows in {p}")));
            }
        }
    }
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
        return Err(Error::Config("learning_rate must be positive".into()));
    }
    if !(config.l2 >= 0.0 && config.l2.is_finite()) {
        return Err(Error::Config("l2 must be non-negative".into()));
    }
    if config.max_leaves < 1 {
        return Err(Error::Config("max_leaves must be at least 1".into()));
    }
    if config.max_bins == 0 {
        return Err(Error::Config("max_bins must be at least 1".into()));
    }
    Ok(())
}

/// Additive update for one term. Each bag fits a small histogram tree (at
/// most `max_leaves` contiguous runs of bins, ridge Newton leaf values); the
/// per-bin steps are averaged over bags, scaled by the learning rate, then
/// halved per bin until they no longer raise that bin's training loss.
fn term_step(
    rows: &[usize],
    bins: &[u16],
    labels: &[u8],
    scores: &[f64],
    values: &[f64],
    bags: &[Vec<u32>],
    config: &EbmConfig,
) -> Vec<f64> {
    let nb = values.len();
    let mut grad = Vec::with_capacity(rows.len());
    let mut hess = Vec::with_capacity(rows.len());
    for &i in rows {
        let p = sigmoid(scores[i]);
        grad.push(labels[i] as f64 - p);
        hess.push(p * (1.0 - p));
    }

    let mut step_sum = vec![0.0; nb];
    let mut accumulate = |weight: &dyn Fn(usize) -> f64| {
        let mut hist = Histogram::new(nb);
        for (k, &i) in rows.iter().enumerate() {
            let w = weight(i);
            if w == 0.0 {
                continue;
            }
            let b = bins[i] as usize;
            hist.g[b] += w * grad[k];
            hist.h[b] += w * hess[k];
            hist.c[b] += w;
        }
        for (s, v) in step_sum.iter_mut().zip(hist.tree_step(config)) {
            *s += v;
        }
    };
    let n_bags = if bags.is_empty() {
        accumulate(&|_| 1.0);
        1
    } else {
        for bag in bags {
            accumulate(&|i| bag[i] as f64);
        }
        bags.len()
    };
    let mut delta: Vec<f64> = step_sum.iter().map(|s| config.learning_rate * s / n_bags as f64).collect();

    let mut before = vec![0.0; nb];
    for &i in rows {
        before[bins[i] as usize] += logistic_loss(scores[i], labels[i]);
    }
    let mut pending: Vec<bool> = delta.iter().map(|d| *d != 0.0).collect();
    for attempt in 0..=MAX_HALVINGS {
        if !pending.iter().any(|p| *p) {
            break;
        }
        let mut after = vec![0.0; nb];
        for &i in rows {
            let b = bins[i] as usize;
            if pending[b] {
                after[b] += logistic_loss(scores[i] + delta[b], labels[i]);
            }
        }
        for b in 0..nb {
            if !pending[b] {
                continue;
            }
            if after[b] <= before[b] {
                pending[b] = false;
            } else if attempt == MAX_HALVINGS {
                delta[b] = 0.0;
            } else {
                delta[b] *= 0.5;
            }
        }
    }
    delta
}

struct Histogram {
    g: Vec<f64>,
    h: Vec<f64>,
    c: Vec<f64>,
}

impl Histogram {
    fn new(nb: usize) -> Self {
        Self {
            g: vec![0.0; nb],
            h: vec![0.0; nb],
            c: vec![0.0; nb],
        }
    }

    fn sums(&self, lo: usize, hi: usize) -> (f64, f64, f64) {
        (self.g[lo..hi].iter().sum(), self.h[lo..hi].iter().sum(), self.c[lo..hi].iter().sum())
    }

    /// Greedy best-first splitting of the bin range into contiguous leaves.
    /// Returns the leaf value of every bin.
    fn tree_step(&self, config: &EbmConfig) -> Vec<f64> {
        let nb = self.g.len();
        let score = |g: f64, h: f64| g * g / (h + config.l2);
        let min_leaf = config.min_samples_leaf as f64;
        let mut leaves = vec![(0, nb)];
        while leaves.len() < config.max_leaves {
            let mut best: Option<(f64, usize, usize)> = None;
            for (li, &(lo, hi)) in leaves.iter().enumerate() {
                let (g, h, c) = self.sums(lo, hi);
                let (mut gl, mut hl, mut cl) = (0.0, 0.0, 0.0);
                for cut in lo + 1..hi {
                    gl += self.g[cut - 1];
                    hl += self.h[cut - 1];
                    cl += self.c[cut - 1];
                    if cl < min_leaf || c - cl < min_leaf {
                        continue;
                    }
                    let gain = score(gl, hl) + score(g - gl, h - hl) - score(g, h);
                    if gain > 1e-12 && best.map_or(true, |b| gain > b.0) {
                        best = Some((gain, li, cut));
                    }
                }
            }
            let Some((_, li, cut)) = best else { break };
            let (lo, hi) = leaves[li];
            leaves[li] = (lo, cut);
            leaves.insert(li + 1, (cut, hi));
        }
        let mut out = vec![0.0; nb];
        for (lo, hi) in leaves {
            let (g, h, c) = self.sums(lo, hi);
            let denom = h + config.l2;
            if c > 0.0 && denom > 1e-12 {
                out[lo..hi].fill(g / denom);
            }
        }
        out
    }
}

fn weighted_mean(values: &[f64], bins: &[u16], rows: &[usize]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter().map(|&i| values[bins[i] as usize]).sum::<f64>() / rows.len() as f64
}

fn centered(spec: &BinSpec, values: &[f64], m: f64) -> ShapeFunction {
    ShapeFunction {
        bins: spec.clone(),
        values: values.iter().map(|v| v - m).collect(),
    }
}
