//! Temporal drift: shape similarity between periods, band overlap,
//! cross-participant aggregation and the cross-period train/test cases.

mod cases;
mod metrics;
mod report;

pub use cases::{cross_period_cases, Case, CaseResult, CaseTable, CasesConfig};
pub use metrics::{aggregate_stability, ci_nonoverlap, shape_correlation, FeatureStability};
pub use report::{
    analyze_drift, group_by_participant, summarize_case_tables, write_shapes_csv, write_stability_csv, CaseSummary, DriftAnalysis,
    DriftConfig, DriftReport, FeatureDrift, ParticipantDrift, SkippedParticipant, REPORT_FORMAT_VERSION,
};
