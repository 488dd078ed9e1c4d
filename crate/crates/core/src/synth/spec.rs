use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureName;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Marginal {
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl Marginal {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Marginal::Normal { mean, sd } => Normal::new(mean, sd).expect("validated").sample(rng),
            Marginal::Uniform { lo, hi } => rng.gen_range(lo..hi),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Marginal::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            Marginal::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid marginal {self:?}")))
        }
    }
}

/// Closed-form additive log-odds contribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Zero,
    /// `slope * (x - center)`
    Linear { slope: f64, center: f64 },
    /// `height * (sigmoid((x - center) / width) - 1/2)`
    LogisticRamp { height: f64, center: f64, width: f64 },
    /// `height * exp(-(x - center)^2 / (2 width^2))`
    GaussianBump { height: f64, center: f64, width: f64 },
}

impl Shape {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Shape::Zero => 0.0,
            Shape::Linear { slope, center } => slope * (x - center),
            Shape::LogisticRamp { height, center, width } => height * (crate::stats::sigmoid((x - center) / width) - 0.5),
            Shape::GaussianBump { height, center, width } => {
                let z = (x - center) / width;
                height * (-0.5 * z * z).exp()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Shape::Zero => true,
            Shape::Linear { slope, .. } => slope == 0.0,
            Shape::LogisticRamp { height, .. } | Shape::GaussianBump { height, .. } => height == 0.0,
        }
    }
}

/// How the period-2 mechanism departs from period 1 for one feature.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Drift {
    #[default]
    None,
    /// Period-2 total shape is `f_com(x - shift)`.
    XShift { shift: f64 },
    /// Period-2 total shape is `factor * f_com(x)`.
    YScale { factor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTruth {
    pub feature: FeatureName,
    pub marginal: Marginal,
    pub shape: Shape,
    #[serde(default)]
    pub drift: Drift,
}

impl FeatureTruth {
    pub fn f_com(&self, x: f64) -> f64 {
        self.shape.eval(x)
    }

    pub fn f_int(&self, x: f64) -> f64 {
        match self.drift {
            Drift::None => 0.0,
            Drift::XShift { shift } => self.shape.eval(x - shift) - self.shape.eval(x),
            Drift::YScale { factor } => (factor - 1.0) * self.shape.eval(x),
        }
    }

    /// Period-2 total contribution `f_com + f_int`.
    pub fn f_total(&self, x: f64) -> f64 {
        self.f_com(x) + self.f_int(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionLayout {
    pub start_time: f64,
    /// Seconds between consecutive annotations; the first annotation sits
    /// `lead_secs` after the recording start.
    pub spacing_secs: f64,
    pub lead_secs: f64,
    pub bvp_amplitude: f64,
    pub baseline_hr: f64,
}

impl Default for SessionLayout {
    fn default() -> Self {
        Self {
            start_time: 1_600_000_000.0,
            spacing_secs: 240.0,
            lead_secs: 240.0,
            bvp_amplitude: 100.0,
            baseline_hr: 70.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSpec {
    pub intercept: f64,
    pub features: Vec<FeatureTruth>,
    #[serde(default = "default_participants")]
    pub participants: Vec<String>,
    pub n_per_period: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub session: SessionLayout,
}

fn default_participants() -> Vec<String> {
    vec!["S01".to_string()]
}

impl TruthSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.intercept.is_finite() {
            return Err(Error::Config("intercept must be finite".into()));
        }
        if self.features.is_empty() || self.features.iter().all(|f| f.shape.is_zero()) {
            return Err(Error::Config("at least one feature needs a non-zero shape".into()));
        }
        for (i, f) in self.features.iter().enumerate() {
            f.marginal.validate()?;
            if self.features[..i].iter().any(|g| g.feature == f.feature) {
                return Err(Error::Config(format!("feature {} listed twice", f.feature)));
            }
        }
        if self.participants.is_empty() {
            return Err(Error::Config("at least one participant is required".into()));
        }
        let s = &self.session;
        if !(s.spacing_secs >= 50.0 && s.lead_secs >= 240.0) {
            return Err(Error::Config("session spacing must be >= 50 s and lead >= 240 s".into()));
        }
        Ok(())
    }

    pub fn feature_names(&self) -> Vec<FeatureName> {
        self.features.iter().map(|f| f.feature).collect()
    }

    pub fn truth(&self, feature: FeatureName) -> Option<&FeatureTruth> {
        self.features.iter().find(|f| f.feature == feature)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let spec = match name {
            "null" => base_spec(1000, &[]),
            "x_shift" => base_spec(1000, &[(FeatureName::EdaMin, Drift::XShift { shift: EDA_MIN_SHIFT })]),
            "y_scale" => base_spec(1000, &[(FeatureName::Hr, Drift::YScale { factor: 0.5 })]),
            "calibrated" => base_spec(
                1000,
                &[
                    (FeatureName::EdaMin, Drift::XShift { shift: EDA_MIN_SHIFT }),
                    (FeatureName::Hr, Drift::YScale { factor: 0.6 }),
                ],
            ),
            "small" => {
                let mut s = base_spec(12, &[(FeatureName::EdaMin, Drift::XShift { shift: EDA_MIN_SHIFT })]);
                s.participants = vec!["S01".into(), "S02".into()];
                s
            }
            other => return Err(Error::Config(format!("unknown synth preset `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub const PRESETS: [&str; 5] = ["null", "x_shift", "y_scale", "calibrated", "small"];

const EDA_MIN_SHIFT: f64 = 0.9;

/// Five model features on physiological scales with strong, smooth shapes.
fn base_spec(n_per_period: usize, drifts: &[(FeatureName, Drift)]) -> TruthSpec {
    let drift_of = |f: FeatureName| drifts.iter().find(|d| d.0 == f).map_or(Drift::None, |d| d.1);
    let mk = |feature, marginal, shape| FeatureTruth {
        feature,
        marginal,
        shape,
        drift: drift_of(feature),
    };
    TruthSpec {
        intercept: -0.4,
        features: vec![
            mk(
                FeatureName::Hr,
                Marginal::Uniform { lo: 60.0, hi: 100.0 },
                Shape::LogisticRamp {
                    height: 4.0,
                    center: 80.0,
                    width: 5.0,
                },
            ),
            mk(
                FeatureName::TempAve,
                Marginal::Uniform { lo: 31.5, hi: 34.5 },
                Shape::Linear {
                    slope: -1.0,
                    center: 33.0,
                },
            ),
            mk(
                FeatureName::AccAve,
                Marginal::Uniform { lo: 0.95, hi: 1.25 },
                Shape::Linear {
                    slope: 10.0,
                    center: 1.1,
                },
            ),
            mk(
                FeatureName::EdaMin,
                Marginal::Uniform { lo: 0.5, hi: 3.5 },
                Shape::GaussianBump {
                    height: 3.0,
                    center: 1.6,
                    width: 0.5,
                },
            ),
            mk(
                FeatureName::EdaMax,
                Marginal::Uniform { lo: 4.0, hi: 8.0 },
                Shape::LogisticRamp {
                    height: 3.0,
                    center: 6.0,
                    width: 0.6,
                },
            ),
        ],
        participants: default_participants(),
        n_per_period,
        seed: 0,
        session: SessionLayout::default(),
    }
}
