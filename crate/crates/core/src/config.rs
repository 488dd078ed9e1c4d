//! Pipeline configuration: one TOML file, flag overrides on top, and a hash
//! of everything except paths that every artifact carries.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::drift::{CasesConfig, DriftConfig};
use crate::ebm::{EbmConfig, EnsembleConfig};
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::seed::derive_seed;
use crate::selection::SelectionConfig;
use crate::signal::{ArousalMapping, SegmentTiming, ACC_UNITS_PER_G};

/// Prefix of the environment variables that override command-line flags.
pub const ENV_PREFIX: &str = "AFFECT_DRIFT_";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Root searched for session directories; `<out>/sessions` when unset.
    pub sessions: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessParams {
    pub acc_units_per_g: f64,
    pub segment: SegmentTiming,
    pub arousal: ArousalMapping,
    pub outlier_sigma: f64,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        Self {
            acc_units_per_g: ACC_UNITS_PER_G,
            segment: SegmentTiming::default(),
            arousal: ArousalMapping::default(),
            outlier_sigma: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionParams {
    pub k: usize,
    pub folds: usize,
    /// Boosting rounds of the wrapper model.
    pub rounds: usize,
}

impl Default for SelectionParams {
    fn default() -> Self {
        let d = SelectionConfig::default();
        Self {
            k: d.k,
            folds: d.folds,
            rounds: d.ebm.rounds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleParams {
    pub n_repeats: usize,
    pub n_per_period: usize,
    pub grid_points: usize,
    pub band_quantiles: (f64, f64),
}

impl Default for EnsembleParams {
    fn default() -> Self {
        let d = EnsembleConfig::default();
        Self {
            n_repeats: d.n_repeats,
            n_per_period: d.n_per_period,
            grid_points: d.grid_points,
            band_quantiles: d.band_quantiles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: Paths,
    pub preprocess: PreprocessParams,
    pub features: FeatureConfig,
    pub selection: SelectionParams,
    pub ebm: EbmConfig,
    pub ensemble: EnsembleParams,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::MissingInput {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        let f = &self.features;
        if f.filter_order == 0 || f.filter_order > 8 {
            return bad("features.filter_order must be in 1..=8");
        }
        if !(f.filter_cutoff_hz > 0.0 && f.filter_cutoff_hz < 32.0) {
            return bad("features.filter_cutoff_hz must be in (0, 32)");
        }
        if !(f.window_secs > 0.0 && f.stride_secs > 0.0) {
            return bad("features.window_secs and stride_secs must be positive");
        }
        let p = &self.preprocess;
        if !(p.outlier_sigma > 0.0 && p.outlier_sigma.is_finite()) {
            return bad("preprocess.outlier_sigma must be positive");
        }
        if !(p.acc_units_per_g > 0.0 && p.acc_units_per_g.is_finite()) {
            return bad("preprocess.acc_units_per_g must be positive");
        }
        if !p.arousal.is_total() {
            return bad("preprocess.arousal must map every emotion category");
        }
        let s = &self.selection;
        if s.k > crate::features::FEATURE_COUNT || s.folds < 2 || s.rounds == 0 {
            return bad("selection needs k <= 17, folds >= 2 and rounds >= 1");
        }
        let e = &self.ebm;
        if e.rounds == 0 || !(e.learning_rate > 0.0 && e.learning_rate <= 1.0) || e.max_bins < 2 || e.max_bins > 1024 {
            return bad("ebm needs rounds >= 1, learning_rate in (0, 1] and max_bins in 2..=1024");
        }
        if e.max_leaves == 0 || !(e.l2 >= 0.0 && e.l2.is_finite()) {
            return bad("ebm needs max_leaves >= 1 and a non-negative l2");
        }
        let n = &self.ensemble;
        let (lo, hi) = n.band_quantiles;
        if n.n_repeats == 0 || n.n_per_period < 2 || n.grid_points < 3 || !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return bad("ensemble needs n_repeats >= 1, n_per_period >= 2, grid_points >= 3 and 0 <= lo < hi <= 1");
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON of every setting except paths.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.paths = Paths::default();
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.paths.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn sessions_dir(&self) -> PathBuf {
        self.paths.sessions.clone().unwrap_or_else(|| self.out_dir().join("sessions"))
    }

    pub fn selection_config(&self) -> SelectionConfig {
        let d = SelectionConfig::default();
        SelectionConfig {
            k: self.selection.k,
            folds: self.selection.folds,
            seed: derive_seed(self.seed, &[1]),
            ebm: EbmConfig {
                rounds: self.selection.rounds,
                learning_rate: self.ebm.learning_rate,
                max_bins: self.ebm.max_bins,
                ..d.ebm
            },
        }
    }

    pub fn ensemble_config(&self) -> EnsembleConfig {
        EnsembleConfig {
            n_repeats: self.ensemble.n_repeats,
            n_per_period: self.ensemble.n_per_period,
            grid_points: self.ensemble.grid_points,
            band_quantiles: self.ensemble.band_quantiles,
            ebm: self.ebm.clone(),
            seed: derive_seed(self.seed, &[2]),
        }
    }

    pub fn cases_config(&self) -> CasesConfig {
        CasesConfig {
            n_repeats: self.ensemble.n_repeats,
            n_per_period: self.ensemble.n_per_period,
            ebm: self.ebm.clone(),
            seed: derive_seed(self.seed, &[3]),
        }
    }

    pub fn drift_config(&self) -> DriftConfig {
        DriftConfig {
            ensemble: self.ensemble_config(),
            cases: None,
        }
    }

    /// Seed for the single full-data model written by `fit`.
    pub fn model_seed(&self) -> u64 {
        derive_seed(self.seed, &[4])
    }
}
