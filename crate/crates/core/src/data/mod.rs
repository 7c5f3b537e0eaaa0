//! Tabular data: CSV ingestion, train/test splitting, scaling and the
//! synthetic linear-band generator.

mod scaler;
mod split;
mod synth;
mod table;

pub use scaler::{apply_scaler, fit_scaler, Scaler, ScalerKind};
pub(crate) use scaler::{mean_std, min_max};
pub use split::{stratified_split, train_test_split, SplitResult, SplitSpec};
pub use synth::{generate_synthetic_linear, SyntheticLinear};
pub use table::Table;
