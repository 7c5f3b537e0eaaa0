//! Reconstruction-error columns (RECols): one leave-one-out regressor per
//! original column, whose per-row prediction error becomes a new feature.

mod config;
mod engine;

pub use config::{ErrorMetric, FeatureMode, R2Filter, RecolConfig, RecolScaling};
pub use engine::{
    clip_errors, fit_recols, reconstruction_error, select_recols, ColumnSource, FeatureMatrix,
    FeatureSpace, RecolColumn, RecolModelSet, MODEL_SET_VERSION,
};
