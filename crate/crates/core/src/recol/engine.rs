use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::data::{mean_std, min_max, Scaler, Table};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;
use crate::recol::config::{ErrorMetric, FeatureMode, RecolConfig};
use crate::regress::{self, r_squared, TrainedRegressor};

pub const MODEL_SET_VERSION: u32 = 1;

/// Per-row reconstruction error.
pub fn reconstruction_error(y: &[f64], y_hat: &[f64], metric: ErrorMetric) -> Result<Vec<f64>> {
    if y.len() != y_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            actual: y_hat.len(),
        });
    }
    Ok(y.iter()
        .zip(y_hat)
        .map(|(a, b)| match metric {
            ErrorMetric::Mse => (a - b) * (a - b),
            ErrorMetric::Mad => (a - b).abs(),
        })
        .collect())
}

/// Caps each error at twice the given (training) standard deviation.
pub fn clip_errors(errors: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) {
        return Err(Error::param(format!("clipping sigma must be >= 0, got {sigma}")));
    }
    let cap = 2.0 * sigma;
    Ok(errors.iter().map(|&e| e.min(cap)).collect())
}

/// Fitted reconstruction model for one original column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecolColumn {
    pub column: usize,
    pub name: String,
    /// Original column indices fed to the regressor; never contains `column`.
    pub inputs: Vec<usize>,
    pub regressor: TrainedRegressor,
    pub r2: f64,
    /// Population standard deviation of the unclipped train errors.
    pub train_error_stddev: f64,
    /// Min-max bounds of the (possibly clipped) train errors.
    pub error_min: f64,
    pub error_max: f64,
}

impl RecolColumn {
    fn scale(&self, e: f64) -> f64 {
        let range = self.error_max - self.error_min;
        (e - self.error_min) / if range > 0.0 { range } else { 1.0 }
    }
}

/// The fitted RECol transform: the input scaler plus one reconstruction
/// model per original column. Immutable once fitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecolModelSet {
    pub version: u32,
    pub config: RecolConfig,
    pub column_names: Vec<String>,
    pub input_scaler: Scaler,
    pub columns: Vec<RecolColumn>,
}

pub fn fit_recols(train: &Table, cfg: &RecolConfig) -> Result<RecolModelSet> {
    cfg.validate()?;
    let d = train.n_cols();
    if d < 2 {
        return Err(Error::param(format!(
            "leave-one-out reconstruction needs at least 2 columns, got {d}"
        )));
    }
    let input_scaler = Scaler::fit(train, cfg.input_scaling);
    let scaled = input_scaler.apply(&train.without_labels())?.to_matrix();

    let columns = par::map_range(d, |j| fit_column(&scaled, train.names(), j, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(RecolModelSet {
        version: MODEL_SET_VERSION,
        config: cfg.clone(),
        column_names: train.names().to_vec(),
        input_scaler,
        columns,
    })
}

fn fit_column(scaled: &Matrix, names: &[String], j: usize, cfg: &RecolConfig) -> Result<RecolColumn> {
    let inputs: Vec<usize> = (0..scaled.cols()).filter(|&k| k != j).collect();
    let x = scaled.select_columns(&inputs);
    let y = scaled.column(j);
    let regressor = regress::fit(&cfg.regressor.reseeded(j as u64), &x, &y)?
        .with_feature_names(inputs.iter().map(|&k| names[k].clone()).collect());
    let y_hat = regressor.predict(&x)?;
    let r2 = r_squared(&y, &y_hat)?;
    let errors = reconstruction_error(&y, &y_hat, cfg.error_metric)?;
    let (_, sigma) = mean_std(&errors);
    let errors = if cfg.clip_at_2sigma {
        clip_errors(&errors, sigma)?
    } else {
        errors
    };
    let (error_min, error_max) = min_max(&errors);
    Ok(RecolColumn {
        column: j,
        name: names[j].clone(),
        inputs,
        regressor,
        r2,
        train_error_stddev: sigma,
        error_min,
        error_max,
    })
}

/// Indices of RECols that survive the R² filter.
pub fn select_recols(ms: &RecolModelSet, cfg: &RecolConfig) -> Result<Vec<usize>> {
    let kept: Vec<usize> = ms
        .columns
        .iter()
        .filter(|c| cfg.r2_drop.keeps(c.r2))
        .map(|c| c.column)
        .collect();
    if kept.is_empty() && cfg.feature_mode == FeatureMode::RecolOnly {
        return Err(Error::AllRecolsDropped);
    }
    Ok(kept)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnSource {
    Original(usize),
    Recol(usize),
}

/// Input to the outlier scorers, with per-column provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub matrix: Matrix,
    pub sources: Vec<ColumnSource>,
    pub names: Vec<String>,
}

impl FeatureMatrix {
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn width(&self) -> usize {
        self.matrix.cols()
    }

    pub fn n_recols(&self) -> usize {
        self.sources
            .iter()
            .filter(|s| matches!(s, ColumnSource::Recol(_)))
            .count()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(&self.names)?;
        for row in self.matrix.row_iter() {
            wtr.write_record(row.iter().map(f64::to_string))?;
        }
        wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

impl RecolModelSet {
    pub fn kept(&self) -> Result<Vec<usize>> {
        self.kept_as(self.config.feature_mode)
    }

    fn kept_as(&self, mode: FeatureMode) -> Result<Vec<usize>> {
        let cfg = RecolConfig {
            feature_mode: mode,
            ..self.config.clone()
        };
        select_recols(self, &cfg)
    }

    fn scaled_inputs(&self, t: &Table) -> Result<Matrix> {
        t.check_same_schema(&self.column_names)?;
        Ok(self.input_scaler.apply(&t.without_labels())?.to_matrix())
    }

    fn errors_for(&self, scaled: &Matrix, kept: &[usize]) -> Result<Vec<Vec<f64>>> {
        par::map_slice(kept, |&j| {
            let col = &self.columns[j];
            let y_hat = col.regressor.predict(&scaled.select_columns(&col.inputs))?;
            let errors = reconstruction_error(&scaled.column(j), &y_hat, self.config.error_metric)?;
            if self.config.clip_at_2sigma {
                clip_errors(&errors, col.train_error_stddev)
            } else {
                Ok(errors)
            }
        })
        .into_iter()
        .collect()
    }

    /// Kept RECols before min-max scaling (clipped with the train sigma when
    /// clipping is configured). Columns are in original-column order.
    pub fn recol_errors(&self, t: &Table) -> Result<Matrix> {
        self.recol_errors_as(t, self.config.feature_mode)
    }

    /// [`Self::recol_errors`] as if the set had been fitted for `mode`.
    pub fn recol_errors_as(&self, t: &Table, mode: FeatureMode) -> Result<Matrix> {
        let scaled = self.scaled_inputs(t)?;
        let kept = self.kept_as(mode)?;
        let cols = self.errors_for(&scaled, &kept)?;
        matrix_from_columns(&cols, t.n_rows())
    }

    /// Kept RECols min-max scaled with the train-fitted bounds. Values on
    /// unseen rows may leave [0, 1].
    pub fn recols(&self, t: &Table) -> Result<Matrix> {
        let scaled = self.scaled_inputs(t)?;
        let kept = self.kept()?;
        let cols = self.scaled_recols(&scaled, &kept)?;
        matrix_from_columns(&cols, t.n_rows())
    }

    fn scaled_recols(&self, scaled: &Matrix, kept: &[usize]) -> Result<Vec<Vec<f64>>> {
        let mut cols = self.errors_for(scaled, kept)?;
        for (col, &j) in cols.iter_mut().zip(kept) {
            for e in col.iter_mut() {
                *e = self.columns[j].scale(*e);
            }
        }
        Ok(cols)
    }

    pub fn transform(&self, t: &Table) -> Result<FeatureMatrix> {
        self.transform_as(t, self.config.feature_mode)
    }

    /// Feature matrix for `mode`; the fitted regressors do not depend on
    /// the mode, so one set can serve every mode.
    pub fn transform_as(&self, t: &Table, mode: FeatureMode) -> Result<FeatureMatrix> {
        let scaled = self.scaled_inputs(t)?;
        let kept = self.kept_as(mode)?;
        let d = self.column_names.len();

        let mut columns: Vec<Vec<f64>> = Vec::new();
        let mut sources = Vec::new();
        let mut names = Vec::new();
        if mode != FeatureMode::RecolOnly {
            for j in 0..d {
                columns.push(if self.config.scale_original {
                    scaled.column(j)
                } else {
                    t.column(j).to_vec()
                });
                sources.push(ColumnSource::Original(j));
                names.push(self.column_names[j].clone());
            }
        }
        if mode != FeatureMode::OriginalOnly {
            columns.extend(self.scaled_recols(&scaled, &kept)?);
            for &j in &kept {
                sources.push(ColumnSource::Recol(j));
                names.push(format!("recol_{}", self.column_names[j]));
            }
        }

        let expected = match mode {
            FeatureMode::OriginalOnly => d,
            FeatureMode::RecolOnly => kept.len(),
            FeatureMode::Combined => d + kept.len(),
        };
        assert_eq!(columns.len(), expected, "feature width accounting");
        Ok(FeatureMatrix {
            matrix: matrix_from_columns(&columns, t.n_rows())?,
            sources,
            names,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<RecolModelSet> {
        let ms: RecolModelSet = serde_json::from_str(s)?;
        if ms.version != MODEL_SET_VERSION {
            return Err(Error::SchemaMismatch(format!(
                "model set version {} is not supported (expected {MODEL_SET_VERSION})",
                ms.version
            )));
        }
        Ok(ms)
    }
}

fn matrix_from_columns(cols: &[Vec<f64>], rows: usize) -> Result<Matrix> {
    if cols.is_empty() {
        return Ok(Matrix::zeros(rows, 0));
    }
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    Matrix::from_columns(&refs)
}

/// Feature-space builder that covers all three modes. In `original_only`
/// mode no regressor is ever fitted or evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSpace {
    Original {
        column_names: Vec<String>,
        scaler: Option<Scaler>,
    },
    Recol(Box<RecolModelSet>),
}

impl FeatureSpace {
    pub fn fit(train: &Table, cfg: &RecolConfig) -> Result<FeatureSpace> {
        if cfg.feature_mode == FeatureMode::OriginalOnly {
            cfg.validate()?;
            return Ok(FeatureSpace::Original {
                column_names: train.names().to_vec(),
                scaler: cfg
                    .scale_original
                    .then(|| Scaler::fit(train, cfg.input_scaling)),
            });
        }
        let ms = fit_recols(train, cfg)?;
        ms.kept()?;
        Ok(FeatureSpace::Recol(Box::new(ms)))
    }

    pub fn transform(&self, t: &Table) -> Result<FeatureMatrix> {
        match self {
            FeatureSpace::Original {
                column_names,
                scaler,
            } => {
                t.check_same_schema(column_names)?;
                let t = t.without_labels();
                let matrix = match scaler {
                    Some(s) => s.apply(&t)?.to_matrix(),
                    None => t.to_matrix(),
                };
                Ok(FeatureMatrix {
                    matrix,
                    sources: (0..column_names.len()).map(ColumnSource::Original).collect(),
                    names: column_names.clone(),
                })
            }
            FeatureSpace::Recol(ms) => ms.transform(t),
        }
    }

    pub fn model_set(&self) -> Option<&RecolModelSet> {
        match self {
            FeatureSpace::Recol(ms) => Some(ms),
            FeatureSpace::Original { .. } => None,
        }
    }
}
