use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coef: Vec<f64>,
    /// Ridge penalty actually used; 0 when the normal equations were well posed.
    pub ridge: f64,
}

impl LinearModel {
    /// Least squares with intercept via centered normal equations. When the
    /// Gram matrix is numerically singular a ridge term of
    /// `1e-8 * trace / p` is added and the system solved again.
    pub fn fit(x: &Matrix, y: &[f64]) -> LinearModel {
        let (n, p) = (x.rows(), x.cols());
        let nf = n as f64;
        let x_mean: Vec<f64> = (0..p)
            .map(|j| x.row_iter().map(|r| r[j]).sum::<f64>() / nf)
            .collect();
        let y_mean = y.iter().sum::<f64>() / nf;

        let mut gram = vec![0.0; p * p];
        let mut rhs = vec![0.0; p];
        let mut centered = vec![0.0; p];
        for (row, &yi) in x.row_iter().zip(y) {
            for j in 0..p {
                centered[j] = row[j] - x_mean[j];
            }
            let yc = yi - y_mean;
            for a in 0..p {
                rhs[a] += centered[a] * yc;
                for b in 0..=a {
                    gram[a * p + b] += centered[a] * centered[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                gram[b * p + a] = gram[a * p + b];
            }
        }

        let (coef, ridge) = match cholesky_solve(&gram, &rhs, p, 0.0) {
            Some(c) => (c, 0.0),
            None => {
                let trace: f64 = (0..p).map(|j| gram[j * p + j]).sum();
                let lambda = 1e-8 * (trace / p as f64).max(f64::MIN_POSITIVE);
                let c = cholesky_solve(&gram, &rhs, p, lambda).unwrap_or_else(|| vec![0.0; p]);
                (c, lambda)
            }
        };
        let intercept = y_mean - coef.iter().zip(&x_mean).map(|(c, m)| c * m).sum::<f64>();
        LinearModel {
            intercept,
            coef,
            ridge,
        }
    }

    #[inline]
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept + self.coef.iter().zip(row).map(|(c, v)| c * v).sum::<f64>()
    }
}

/// Solves `(A + lambda I) x = b` for symmetric `A`. Returns `None` when a
/// pivot falls below `1e-12` of the largest diagonal entry.
fn cholesky_solve(a: &[f64], b: &[f64], p: usize, lambda: f64) -> Option<Vec<f64>> {
    let max_diag = (0..p).map(|j| a[j * p + j] + lambda).fold(0.0, f64::max);
    let tol = 1e-12 * max_diag;
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut sum = a[i * p + j] + if i == j { lambda } else { 0.0 };
            for k in 0..j {
                sum -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if !(sum > tol) {
                    return None;
                }
                l[i * p + i] = sum.sqrt();
            } else {
                l[i * p + j] = sum / l[j * p + j];
            }
        }
    }
    let mut z = vec![0.0; p];
    for i in 0..p {
        let s: f64 = (0..i).map(|k| l[i * p + k] * z[k]).sum();
        z[i] = (b[i] - s) / l[i * p + i];
    }
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|k| l[k * p + i] * x[k]).sum();
        x[i] = (z[i] - s) / l[i * p + i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_plane() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![i as f64, ((i * 7) % 5) as f64])
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| 3.0 - 2.0 * r[0] + 0.5 * r[1]).collect();
        let m = LinearModel::fit(&Matrix::from_rows(&rows).unwrap(), &y);
        assert!((m.intercept - 3.0).abs() < 1e-9);
        assert!((m.coef[0] + 2.0).abs() < 1e-9);
        assert!((m.coef[1] - 0.5).abs() < 1e-9);
        assert_eq!(m.ridge, 0.0);
    }

    #[test]
    fn duplicated_column_falls_back_to_ridge() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| 4.0 * i as f64 + 1.0).collect();
        let m = LinearModel::fit(&Matrix::from_rows(&rows).unwrap(), &y);
        assert!(m.ridge > 0.0);
        for (r, yi) in rows.iter().zip(&y) {
            assert!((m.predict_row(r) - yi).abs() < 1e-5);
        }
    }

    #[test]
    fn constant_input_predicts_mean() {
        let x = Matrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        let m = LinearModel::fit(&x, &[1.0, 2.0, 6.0]);
        assert!((m.predict_row(&[1.0]) - 3.0).abs() < 1e-12);
    }
}
