use serde::{Deserialize, Serialize};

use crate::data::Table;
use crate::error::Result;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScalerKind {
    #[default]
    Minmax,
    Standard,
}

/// Affine per-column transform `(x - offset) / scale`, fitted once on
/// training rows and never refitted.
///
/// Constant columns get `scale = 1`, so under min-max they map to 0 on the
/// fit data and under standard scaling they map to 0 as well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    kind: ScalerKind,
    offset: Vec<f64>,
    scale: Vec<f64>,
}

impl Scaler {
    pub fn fit_columns<'a>(kind: ScalerKind, columns: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let (offset, scale) = columns
            .into_iter()
            .map(|col| match kind {
                ScalerKind::Minmax => {
                    let (lo, hi) = min_max(col);
                    let range = hi - lo;
                    (lo, if range > 0.0 { range } else { 1.0 })
                }
                ScalerKind::Standard => {
                    let (mean, sd) = mean_std(col);
                    (mean, if sd > 0.0 { sd } else { 1.0 })
                }
            })
            .unzip();
        Scaler {
            kind,
            offset,
            scale,
        }
    }

    pub fn fit(t: &Table, kind: ScalerKind) -> Self {
        Scaler::fit_columns(kind, t.columns().iter().map(Vec::as_slice))
    }

    pub fn fit_matrix(m: &Matrix, kind: ScalerKind) -> Self {
        let cols: Vec<Vec<f64>> = (0..m.cols()).map(|j| m.column(j)).collect();
        Scaler::fit_columns(kind, cols.iter().map(Vec::as_slice))
    }

    pub fn kind(&self) -> ScalerKind {
        self.kind
    }

    pub fn n_cols(&self) -> usize {
        self.offset.len()
    }

    #[inline]
    pub fn transform_value(&self, col: usize, x: f64) -> f64 {
        (x - self.offset[col]) / self.scale[col]
    }

    pub fn transform_column(&self, col: usize, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&x| self.transform_value(col, x)).collect()
    }

    pub fn apply(&self, t: &Table) -> Result<Table> {
        let columns = t
            .columns()
            .iter()
            .enumerate()
            .map(|(j, c)| self.transform_column(j, c))
            .collect();
        let labels = t.labels().map(<[u8]>::to_vec);
        Table::new(t.names().to_vec(), columns, labels)
    }

    pub fn apply_matrix(&self, m: &Matrix) -> Matrix {
        let mut out = m.clone();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, self.transform_value(j, m.get(i, j)));
            }
        }
        out
    }
}

pub fn fit_scaler(t: &Table, kind: ScalerKind) -> Scaler {
    Scaler::fit(t, kind)
}

pub fn apply_scaler(s: &Scaler, t: &Table) -> Result<Table> {
    s.apply(t)
}

pub(crate) fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Mean and population (1/n) standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_col(v: &[f64]) -> Table {
        Table::new(vec!["a".into()], vec![v.to_vec()], None).unwrap()
    }

    #[test]
    fn minmax_maps_to_unit_interval() {
        let t = one_col(&[1.0, 2.0, 3.0]);
        let s = fit_scaler(&t, ScalerKind::Minmax);
        assert_eq!(apply_scaler(&s, &t).unwrap().column(0), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn standard_uses_population_stddev() {
        let t = one_col(&[1.0, 2.0, 3.0]);
        let s = fit_scaler(&t, ScalerKind::Standard);
        let out = apply_scaler(&s, &t).unwrap();
        let expected = [-1.224744871391589, 0.0, 1.224744871391589];
        for (a, b) in out.column(0).iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn constant_columns_map_to_zero() {
        let t = one_col(&[5.0, 5.0, 5.0]);
        for kind in [ScalerKind::Minmax, ScalerKind::Standard] {
            let s = fit_scaler(&t, kind);
            assert_eq!(apply_scaler(&s, &t).unwrap().column(0), &[0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn test_values_are_not_clipped() {
        let s = fit_scaler(&one_col(&[0.0, 10.0]), ScalerKind::Minmax);
        let out = apply_scaler(&s, &one_col(&[-5.0, 20.0])).unwrap();
        assert_eq!(out.column(0), &[-0.5, 2.0]);
    }
}
