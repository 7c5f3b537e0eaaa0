//! RECol-OD: score rows directly from their RECols, without a downstream
//! outlier model. Each RECol is min-max normalised with bounds fitted on the
//! training rows and the row score is the mean across columns.

use serde::{Deserialize, Serialize};

use crate::data::{Scaler, ScalerKind};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::od::OutlierScores;

pub const SCORER_NAME: &str = "recol-od";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FusionNormalization {
    #[default]
    Minmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FusionAggregation {
    #[default]
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FusionSpec {
    #[serde(default)]
    pub normalization: FusionNormalization,
    #[serde(default)]
    pub aggregation: FusionAggregation,
}

/// Eval values beyond the train bounds are kept, so scores may exceed 1.
pub fn recol_od(recols_train: &Matrix, recols_eval: &Matrix, spec: &FusionSpec) -> Result<OutlierScores> {
    let width = recols_train.cols();
    if width == 0 {
        return Err(Error::param("RECol-OD needs at least one RECol"));
    }
    if recols_eval.cols() != width {
        return Err(Error::DimensionMismatch {
            expected: width,
            actual: recols_eval.cols(),
        });
    }
    let FusionSpec {
        normalization: FusionNormalization::Minmax,
        aggregation: FusionAggregation::Mean,
    } = *spec;
    let scaler = Scaler::fit_matrix(recols_train, ScalerKind::Minmax);
    let scores = recols_eval
        .row_iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| scaler.transform_value(j, v))
                .sum::<f64>()
                / width as f64
        })
        .collect();
    Ok(OutlierScores {
        scorer: SCORER_NAME.to_owned(),
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_column_is_its_normalised_value() {
        let train = Matrix::from_rows(&[vec![2.0], vec![4.0], vec![6.0]]).unwrap();
        let eval = Matrix::from_rows(&[vec![3.0], vec![6.0], vec![10.0]]).unwrap();
        let s = recol_od(&train, &eval, &FusionSpec::default()).unwrap();
        assert_eq!(s.scores, [0.25, 1.0, 2.0]);
        assert_eq!(s.scorer, "recol-od");
    }

    #[test]
    fn row_at_train_max_scores_one() {
        let train = Matrix::from_rows(&[vec![0.0, 1.0, 5.0], vec![2.0, 3.0, 9.0]]).unwrap();
        let eval = Matrix::from_rows(&[vec![2.0, 3.0, 9.0]]).unwrap();
        assert_eq!(recol_od(&train, &eval, &FusionSpec::default()).unwrap().scores, [1.0]);
    }

    #[test]
    fn zero_columns_rejected() {
        let m = Matrix::zeros(3, 0);
        assert!(recol_od(&m, &m, &FusionSpec::default()).is_err());
        let a = Matrix::zeros(3, 2);
        assert!(recol_od(&a, &Matrix::zeros(3, 1), &FusionSpec::default()).is_err());
    }
}
