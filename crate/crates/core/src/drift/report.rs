use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{aggregate_stability, ci_nonoverlap, cross_period_cases, shape_correlation};
use super::{Case, CaseTable, CasesConfig, FeatureStability};
use crate::ebm::{fit_ensemble, Dataset, EnsembleConfig, EnsembleFit};
use crate::error::Result;
use crate::features::{FeatureName, FeatureVector};
use crate::seed::{derive_seed, str_key};
use crate::signal::Period;
use crate::stats::{mean, median};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DriftConfig {
    pub ensemble: EnsembleConfig,
    /// `None` skips the cross-period case table.
    pub cases: Option<CasesConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDrift {
    pub feature: FeatureName,
    /// Between the ensemble-mean `f_com` and `f_com + f_int` curves.
    pub r: Option<f64>,
    pub ci_nonoverlap_fraction: f64,
    pub r_per_repeat_median: Option<f64>,
    pub r_per_repeat: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantDrift {
    pub participant: String,
    pub n_p1: usize,
    pub n_p2: usize,
    pub degraded: bool,
    pub mean_test_accuracy: Option<f64>,
    pub features: Vec<FeatureDrift>,
    pub cases: Option<CaseTable>,
    pub cases_skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedParticipant {
    pub participant: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case: Case,
    pub n_participants: usize,
    pub accuracy: f64,
    pub accuracy_se: f64,
    pub auc: Option<f64>,
    pub auc_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub format_version: u32,
    pub config_hash: Option<String>,
    pub features: Vec<FeatureName>,
    pub participants: Vec<ParticipantDrift>,
    pub skipped: Vec<SkippedParticipant>,
    pub stability: Vec<FeatureStability>,
    pub case_summary: Vec<CaseSummary>,
}

pub struct DriftAnalysis {
    pub report: DriftReport,
    pub ensembles: Vec<(String, EnsembleFit)>,
}

pub fn group_by_participant(rows: &[FeatureVector]) -> BTreeMap<String, Vec<FeatureVector>> {
    let mut groups: BTreeMap<String, Vec<FeatureVector>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.participant_id.clone()).or_default().push(r.clone());
    }
    groups
}

/// Fits the per-participant ensembles and derives the drift metrics.
pub fn analyze_drift(rows: &[FeatureVector], features: &[FeatureName], config: &DriftConfig) -> Result<DriftAnalysis> {
    let mut participants = Vec::new();
    let mut skipped = Vec::new();
    let mut ensembles = Vec::new();
    for (pid, group) in group_by_participant(rows) {
        let (data, _) = Dataset::from_vectors(&group, features);
        let ens_cfg = EnsembleConfig {
            seed: derive_seed(config.ensemble.seed, &[str_key(&pid), 0]),
            ..config.ensemble.clone()
        };
        let fit = match fit_ensemble(&data, &ens_cfg) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("participant {pid} skipped: {e}");
                skipped.push(SkippedParticipant {
                    participant: pid,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let mut entry = participant_drift(&pid, &data, &fit);
        if let Some(cases) = &config.cases {
            let cfg = CasesConfig {
                seed: derive_seed(cases.seed, &[str_key(&pid), 1]),
                ..cases.clone()
            };
            match cross_period_cases(&data, &cfg) {
                Ok(t) => entry.cases = Some(t),
                Err(e) => entry.cases_skipped = Some(e.to_string()),
            }
        }
        participants.push(entry);
        ensembles.push((pid, fit));
    }

    let mut by_feature: BTreeMap<FeatureName, Vec<f64>> = features.iter().map(|f| (*f, Vec::new())).collect();
    for p in &participants {
        for f in &p.features {
            if let Some(r) = f.r {
                by_feature.get_mut(&f.feature).expect("known feature").push(r);
            }
        }
    }
    let report = DriftReport {
        format_version: REPORT_FORMAT_VERSION,
        config_hash: None,
        features: features.to_vec(),
        stability: aggregate_stability(&by_feature),
        case_summary: summarize_cases(&participants),
        participants,
        skipped,
    };
    Ok(DriftAnalysis { report, ensembles })
}

fn participant_drift(pid: &str, data: &Dataset, fit: &EnsembleFit) -> ParticipantDrift {
    let features = fit
        .curves
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let r_per_repeat: Vec<Option<f64>> =
                fit.successful_repeats().map(|rep| shape_correlation(&rep.com[j], &rep.total[j])).collect();
            let defined: Vec<f64> = r_per_repeat.iter().flatten().copied().collect();
            FeatureDrift {
                feature: c.feature,
                r: shape_correlation(&c.com.mean, &c.total.mean),
                ci_nonoverlap_fraction: ci_nonoverlap(&c.com, &c.total),
                r_per_repeat_median: median(&defined),
                r_per_repeat,
            }
        })
        .collect();
    let accs: Vec<f64> = fit.repeats.iter().filter_map(|r| r.metrics.map(|m| m.accuracy)).collect();
    ParticipantDrift {
        participant: pid.to_string(),
        n_p1: data.indices_of(Period::P1).len(),
        n_p2: data.indices_of(Period::P2).len(),
        degraded: fit.degraded,
        mean_test_accuracy: mean(&accs),
        features,
        cases: None,
        cases_skipped: None,
    }
}

fn summarize_cases(participants: &[ParticipantDrift]) -> Vec<CaseSummary> {
    let tables: Vec<&CaseTable> = participants.iter().filter_map(|p| p.cases.as_ref()).collect();
    summarize_case_tables(&tables)
}

/// Case metrics and standard errors averaged across participants.
pub fn summarize_case_tables(tables: &[&CaseTable]) -> Vec<CaseSummary> {
    if tables.is_empty() {
        return Vec::new();
    }
    Case::ALL
        .iter()
        .map(|case| {
            let rows: Vec<_> = tables.iter().map(|t| t.get(*case)).collect();
            let pick = |f: &dyn Fn(&super::CaseResult) -> Option<f64>| {
                let v: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
                mean(&v)
            };
            CaseSummary {
                case: *case,
                n_participants: rows.len(),
                accuracy: pick(&|r| Some(r.accuracy)).expect("non-empty"),
                accuracy_se: pick(&|r| Some(r.accuracy_se)).expect("non-empty"),
                auc: pick(&|r| r.auc),
                auc_se: pick(&|r| r.auc_se),
            }
        })
        .collect()
}

fn hash_line(out: &mut String, config_hash: Option<&str>) {
    if let Some(h) = config_hash {
        let _ = writeln!(out, "# config_hash={h}");
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_shapes_csv(ensembles: &[(String, EnsembleFit)], config_hash: Option<&str>) -> String {
    let mut out = String::new();
    hash_line(&mut out, config_hash);
    out.push_str("participant,feature,grid_x,mean_com,lo_com,hi_com,mean_total,lo_total,hi_total\n");
    for (pid, fit) in ensembles {
        for c in &fit.curves {
            for k in 0..c.grid.len() {
                let _ = writeln!(
                    out,
                    "{pid},{},{},{},{},{},{},{},{}",
                    c.feature, c.grid[k], c.com.mean[k], c.com.lo[k], c.com.hi[k], c.total.mean[k], c.total.lo[k], c.total.hi[k]
                );
            }
        }
    }
    out
}

pub fn write_stability_csv(report: &DriftReport, config_hash: Option<&str>) -> String {
    let mut out = String::new();
    hash_line(&mut out, config_hash);
    out.push_str("feature,participant,r\n");
    for f in &report.features {
        for p in &report.participants {
            if let Some(fd) = p.features.iter().find(|x| x.feature == *f) {
                let _ = writeln!(out, "{f},{},{}", p.participant, opt(fd.r));
            }
        }
    }
    out
}
