//! Explainable boosting machine: additive logistic model with one shape per
//! feature plus period-2 interaction shapes.

mod binning;
mod dataset;
mod ensemble;
mod fit;
mod metrics;
mod model;

pub use binning::{bin_feature, BinSpec};
pub use dataset::Dataset;
pub use ensemble::{band, equal_grid, fit_ensemble, Band, EnsembleConfig, EnsembleFit, FeatureCurves, RepeatRecord};
pub(crate) use ensemble::split_period;
pub use fit::{fit_ebm, fit_ebm_traced, FitTrace};
pub use metrics::{accuracy, auc, evaluate, Metrics};
pub use model::{EbmConfig, EbmModel, ShapeFunction, MODEL_FORMAT_VERSION};
