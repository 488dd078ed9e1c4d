//! Ground-truth generators: feature tables with known shapes and injected
//! drift, and rendered raw-signal sessions.

mod render;
mod sample;
mod spec;

pub use render::{add_pulses, render_bvp, render_session, PulseTemplate, RenderedBvp, RenderedSession};
pub use sample::{sample_dataset, sample_features, true_logit, write_truth_csv, SyntheticRow};
pub use spec::{Drift, FeatureTruth, Marginal, SessionLayout, Shape, TruthSpec, PRESETS};
