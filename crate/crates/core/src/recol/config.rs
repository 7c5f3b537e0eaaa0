use serde::{Deserialize, Serialize};

use crate::data::ScalerKind;
use crate::error::{Error, Result};
use crate::regress::RegressorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMetric {
    /// Squared error per row.
    #[default]
    Mse,
    /// Absolute deviation per row.
    Mad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    OriginalOnly,
    RecolOnly,
    #[default]
    Combined,
}

impl FeatureMode {
    pub fn name(self) -> &'static str {
        match self {
            FeatureMode::OriginalOnly => "original_only",
            FeatureMode::RecolOnly => "recol_only",
            FeatureMode::Combined => "combined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RecolScaling {
    #[default]
    Minmax,
}

/// Drop RECols whose regressor R² falls below `below` or above `above`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct R2Filter {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub below: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub above: Option<f64>,
}

impl R2Filter {
    pub fn keeps(&self, r2: f64) -> bool {
        !(self.below.is_some_and(|b| r2 < b) || self.above.is_some_and(|a| r2 > a))
    }

    pub fn is_active(&self) -> bool {
        self.below.is_some() || self.above.is_some()
    }
}

/// One way of building RECols. The defaults follow the recommended
/// starting point: random forest regressor, squared error, min-max inputs,
/// combined feature space, no clipping and no R² filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecolConfig {
    #[serde(default)]
    pub regressor: RegressorSpec,
    #[serde(default)]
    pub error_metric: ErrorMetric,
    #[serde(default)]
    pub input_scaling: ScalerKind,
    #[serde(default)]
    pub clip_at_2sigma: bool,
    #[serde(default)]
    pub r2_drop: R2Filter,
    #[serde(default)]
    pub recol_scaling: RecolScaling,
    #[serde(default)]
    pub feature_mode: FeatureMode,
    /// Whether original features enter the feature space scaled (with the
    /// regressor input scaler) or raw.
    #[serde(default = "yes")]
    pub scale_original: bool,
}

fn yes() -> bool {
    true
}

impl Default for RecolConfig {
    fn default() -> Self {
        RecolConfig {
            regressor: RegressorSpec::default(),
            error_metric: ErrorMetric::default(),
            input_scaling: ScalerKind::default(),
            clip_at_2sigma: false,
            r2_drop: R2Filter::default(),
            recol_scaling: RecolScaling::default(),
            feature_mode: FeatureMode::default(),
            scale_original: true,
        }
    }
}

impl RecolConfig {
    pub fn validate(&self) -> Result<()> {
        self.regressor.validate()?;
        let R2Filter { below, above } = self.r2_drop;
        for v in [below, above].into_iter().flatten() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(format!("R² threshold {v} outside [0, 1]")));
            }
        }
        if let (Some(b), Some(a)) = (below, above) {
            if b >= a {
                return Err(Error::param(format!(
                    "R² filter needs below < above, got {b} >= {a}"
                )));
            }
        }
        Ok(())
    }

    /// Copy with every field that cannot affect the result in
    /// `original_only` mode reset to its default, so equivalent baseline
    /// configs hash identically.
    pub fn canonical(&self) -> RecolConfig {
        if self.feature_mode != FeatureMode::OriginalOnly {
            return self.clone();
        }
        RecolConfig {
            input_scaling: self.input_scaling,
            scale_original: self.scale_original,
            feature_mode: FeatureMode::OriginalOnly,
            ..RecolConfig::default()
        }
    }
}
