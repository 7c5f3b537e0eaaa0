//! Metrics, experiment execution, grids and report tables.

mod experiment;
mod grid;
mod metrics;
mod report;

pub use experiment::{
    needs_recols, recol_fit_config, run_experiment, select_best, ExperimentConfig, ExperimentResult, Prepared,
    Provenance, ResultKind, ScorerSpec,
};
pub use grid::{read_results, run_grid, GridOutcome, GridSpec};
pub use metrics::{pr_auc, roc_auc, Metric};
pub use report::{
    build_report, delta_report, delta_table, recol_od_report, recol_od_table, DeltaRow, Pct, RecolOdRow, Report,
    ReportStyle,
};
