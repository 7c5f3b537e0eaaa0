//! Supervised regressors used to reconstruct one column from the others:
//! ordinary least squares, CART, random forests and gradient boosting.

mod ensemble;
mod linear;
mod tree;

use serde::{Deserialize, Serialize};

pub use ensemble::{Boosted, Forest};
pub use linear::LinearModel;
pub use tree::{Node, Tree};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;
use crate::seed;
use tree::TreeParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegressorSpec {
    Linear,
    DecisionTree(DecisionTreeParams),
    RandomForest(RandomForestParams),
    GradientBoosting(GradientBoostingParams),
}

impl Default for RegressorSpec {
    fn default() -> Self {
        RegressorSpec::RandomForest(RandomForestParams::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecisionTreeParams {
    /// `None` grows until the leaf-size limit stops it.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl Default for DecisionTreeParams {
    fn default() -> Self {
        DecisionTreeParams {
            max_depth: Some(8),
            min_samples_leaf: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `ceil(sqrt(n_features))`
    #[default]
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => ((n_features as f64).sqrt().ceil() as usize).max(1),
            MaxFeatures::All => n_features,
            MaxFeatures::Count(k) => k.clamp(1, n_features),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
    /// `None` draws a bootstrap sample of size n per tree; `Some(f)` draws
    /// `round(f * n)` rows without replacement (`1.0` uses every row).
    pub subsample: Option<f64>,
    pub seed: u64,
}

impl Default for RandomForestParams {
    fn default() -> Self {
        RandomForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 5,
            max_features: MaxFeatures::Sqrt,
            subsample: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GradientBoostingParams {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Fraction of rows drawn without replacement for each stage.
    pub subsample: f64,
    pub seed: u64,
}

impl Default for GradientBoostingParams {
    fn default() -> Self {
        GradientBoostingParams {
            n_trees: 100,
            learning_rate: 0.1,
            max_depth: Some(3),
            min_samples_leaf: 1,
            subsample: 1.0,
            seed: 0,
        }
    }
}

impl RegressorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            RegressorSpec::Linear => "linear",
            RegressorSpec::DecisionTree(_) => "decision_tree",
            RegressorSpec::RandomForest(_) => "random_forest",
            RegressorSpec::GradientBoosting(_) => "gradient_boosting",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let depth_ok = |d: Option<usize>| d.is_none_or(|d| d >= 1);
        match self {
            RegressorSpec::Linear => Ok(()),
            RegressorSpec::DecisionTree(p) => {
                if !depth_ok(p.max_depth) || p.min_samples_leaf == 0 {
                    return Err(Error::param("decision tree needs max_depth >= 1 and min_samples_leaf >= 1"));
                }
                Ok(())
            }
            RegressorSpec::RandomForest(p) => {
                if p.n_trees == 0 || !depth_ok(p.max_depth) || p.min_samples_leaf == 0 {
                    return Err(Error::param("random forest needs n_trees >= 1, max_depth >= 1, min_samples_leaf >= 1"));
                }
                if matches!(p.max_features, MaxFeatures::Count(0)) {
                    return Err(Error::param("max_features count must be >= 1"));
                }
                if let Some(f) = p.subsample {
                    if !(f > 0.0 && f <= 1.0) {
                        return Err(Error::param("random forest subsample must lie in (0, 1]"));
                    }
                }
                Ok(())
            }
            RegressorSpec::GradientBoosting(p) => {
                if p.n_trees == 0 || !depth_ok(p.max_depth) || p.min_samples_leaf == 0 {
                    return Err(Error::param("gradient boosting needs n_trees >= 1, max_depth >= 1, min_samples_leaf >= 1"));
                }
                // a zero rate is accepted and yields the constant mean predictor
                if !(0.0..=1.0).contains(&p.learning_rate) {
                    return Err(Error::param("learning_rate must lie in [0, 1]"));
                }
                if !(p.subsample > 0.0 && p.subsample <= 1.0) {
                    return Err(Error::param("gradient boosting subsample must lie in (0, 1]"));
                }
                Ok(())
            }
        }
    }

    /// Same spec with its seed replaced by one derived from `stream`
    /// (used to give each reconstructed column its own random stream).
    pub fn reseeded(&self, stream: u64) -> RegressorSpec {
        let mut spec = self.clone();
        match &mut spec {
            RegressorSpec::RandomForest(p) => p.seed = seed::derive(p.seed, stream),
            RegressorSpec::GradientBoosting(p) => p.seed = seed::derive(p.seed, stream),
            RegressorSpec::Linear | RegressorSpec::DecisionTree(_) => {}
        }
        spec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Linear(LinearModel),
    Tree(Tree),
    Forest(Forest),
    Boosted(Boosted),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedRegressor {
    pub spec: RegressorSpec,
    pub n_train: usize,
    pub feature_names: Vec<String>,
    pub model: Model,
}

pub fn fit(spec: &RegressorSpec, x: &Matrix, y: &[f64]) -> Result<TrainedRegressor> {
    spec.validate()?;
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            actual: y.len(),
        });
    }
    if x.rows() < 2 {
        return Err(Error::param(format!("need at least 2 training rows, got {}", x.rows())));
    }
    if x.cols() == 0 {
        return Err(Error::param("regressor needs at least one input feature"));
    }
    if x.as_slice().iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::param("training data contains non-finite values"));
    }

    let all_rows = || (0..x.rows()).collect::<Vec<_>>();
    let model = match spec {
        RegressorSpec::Linear => Model::Linear(LinearModel::fit(x, y)),
        RegressorSpec::DecisionTree(p) => {
            let params = TreeParams {
                max_depth: p.max_depth,
                min_samples_leaf: p.min_samples_leaf,
                max_features: None,
            };
            Model::Tree(Tree::fit(x, y, all_rows(), params, &mut seed::rng(0)))
        }
        RegressorSpec::RandomForest(p) => {
            let params = TreeParams {
                max_depth: p.max_depth,
                min_samples_leaf: p.min_samples_leaf,
                max_features: Some(p.max_features.resolve(x.cols())),
            };
            Model::Forest(Forest::fit(x, y, p.n_trees, p.subsample, params, p.seed))
        }
        RegressorSpec::GradientBoosting(p) => {
            let params = TreeParams {
                max_depth: p.max_depth,
                min_samples_leaf: p.min_samples_leaf,
                max_features: None,
            };
            Model::Boosted(Boosted::fit(
                x,
                y,
                p.n_trees,
                p.learning_rate,
                p.subsample,
                params,
                p.seed,
            ))
        }
    };
    Ok(TrainedRegressor {
        spec: spec.clone(),
        n_train: x.rows(),
        feature_names: (0..x.cols()).map(|j| format!("x{j}")).collect(),
        model,
    })
}

impl TrainedRegressor {
    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        debug_assert_eq!(names.len(), self.feature_names.len());
        self.feature_names = names;
        self
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match &self.model {
            Model::Linear(m) => m.predict_row(row),
            Model::Tree(t) => t.predict_row(row),
            Model::Forest(f) => f.predict_row(row),
            Model::Boosted(b) => b.predict_row(row),
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: x.cols(),
            });
        }
        Ok(par::map_range(x.rows(), |i| self.predict_row(x.row(i))))
    }
}

pub fn predict(m: &TrainedRegressor, x: &Matrix) -> Result<Vec<f64>> {
    m.predict(x)
}

/// Coefficient of determination `1 - SS_res / SS_tot`. A constant target
/// (`SS_tot = 0`) yields 0.
pub fn r_squared(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    if y.len() != y_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            actual: y_hat.len(),
        });
    }
    if y.len() < 2 {
        return Err(Error::param("r_squared needs at least 2 values"));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if ss_tot == 0.0 {
        return Ok(0.0);
    }
    let ss_res: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(1.0 - ss_res / ss_tot)
}
