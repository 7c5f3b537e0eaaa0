use crate::data::min_max;
use crate::matrix::Matrix;

/// Relative height given to empty bins, as a fraction of the tallest bin.
const EMPTY_BIN_HEIGHT: f64 = 1e-6;

#[derive(Debug, Clone)]
struct Histogram {
    lo: f64,
    width: f64,
    /// Heights normalised so the tallest bin is 1.
    heights: Vec<f64>,
}

impl Histogram {
    fn bin(&self, v: f64) -> usize {
        if self.width <= 0.0 {
            return 0;
        }
        let b = ((v - self.lo) / self.width).floor();
        if b <= 0.0 {
            0
        } else {
            (b as usize).min(self.heights.len() - 1)
        }
    }
}

/// Histogram-based outlier score with fixed-width bins per feature.
#[derive(Debug, Clone)]
pub struct Hbos {
    histograms: Vec<Histogram>,
}

impl Hbos {
    pub fn default_bins(n_train: usize) -> usize {
        ((n_train as f64).sqrt().ceil() as usize).max(1)
    }

    pub fn fit(train: &Matrix, n_bins: usize) -> Hbos {
        let histograms = (0..train.cols())
            .map(|j| {
                let col = train.column(j);
                let (lo, hi) = min_max(&col);
                let bins = if hi > lo { n_bins.max(1) } else { 1 };
                let width = (hi - lo) / bins as f64;
                let mut h = Histogram {
                    lo,
                    width,
                    heights: vec![0.0; bins],
                };
                for &v in &col {
                    let b = h.bin(v);
                    h.heights[b] += 1.0;
                }
                let max = h.heights.iter().copied().fold(0.0, f64::max);
                for x in &mut h.heights {
                    *x = if *x > 0.0 { *x / max } else { EMPTY_BIN_HEIGHT };
                }
                h
            })
            .collect();
        Hbos { histograms }
    }

    pub fn width(&self) -> usize {
        self.histograms.len()
    }

    pub fn score(&self, eval: &Matrix) -> Vec<f64> {
        eval.row_iter()
            .map(|row| {
                row.iter()
                    .zip(&self.histograms)
                    .map(|(&v, h)| -h.heights[h.bin(v)].ln())
                    .sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bin_scores_equal() {
        let train = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![5.0]]).unwrap();
        let h = Hbos::fit(&train, 1);
        let s = h.score(&Matrix::from_rows(&[vec![0.5], vec![9.0], vec![-3.0]]).unwrap());
        assert!(s.iter().all(|&v| v == s[0]));
    }

    #[test]
    fn sparse_bins_score_higher() {
        let mut rows: Vec<Vec<f64>> = (0..20).map(|_| vec![0.1]).collect();
        rows.push(vec![1.0]);
        let h = Hbos::fit(&Matrix::from_rows(&rows).unwrap(), 4);
        let s = h.score(&Matrix::from_rows(&[vec![0.1], vec![1.0], vec![0.6]]).unwrap());
        assert_eq!(s[0], 0.0);
        assert!((s[1] - 20f64.ln()).abs() < 1e-12);
        assert!((s[2] - 1e6f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn out_of_range_values_use_edge_bins() {
        let train = Matrix::from_rows(&[vec![0.0], vec![0.0], vec![1.0]]).unwrap();
        let h = Hbos::fit(&train, 2);
        let s = h.score(&Matrix::from_rows(&[vec![-10.0], vec![0.0], vec![10.0], vec![1.0]]).unwrap());
        assert_eq!(s[0], s[1]);
        assert_eq!(s[2], s[3]);
    }
}
