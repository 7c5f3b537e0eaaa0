//! Lloyd's k-means with k-means++ seeding.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::matrix::{squared_euclidean, Matrix};
use crate::{par, seed};

const MAX_ITER: usize = 300;
const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centroids: Matrix,
    pub assignments: Vec<usize>,
    /// Inertia after every assignment step; non-increasing.
    pub inertia_history: Vec<f64>,
}

impl KMeansResult {
    pub fn inertia(&self) -> f64 {
        *self.inertia_history.last().expect("at least one assignment step")
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.centroids.rows()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Index of the nearest centroid (lowest index on ties) and the squared
/// distance to it.
pub fn nearest_centroid(centroids: &Matrix, row: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.row_iter().enumerate() {
        let d = squared_euclidean(centroid, row);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_init(data: &Matrix, k: usize, rng: &mut seed::Rng) -> Matrix {
    let n = data.rows();
    let mut chosen = vec![rng.gen_range(0..n)];
    let mut d2: Vec<f64> = data
        .row_iter()
        .map(|r| squared_euclidean(r, data.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total weight")
        } else {
            // every point coincides with a centroid; take the first unused row
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        for (i, r) in data.row_iter().enumerate() {
            d2[i] = d2[i].min(squared_euclidean(r, data.row(next)));
        }
    }
    data.select_rows(&chosen)
}

pub fn kmeans(data: &Matrix, n_clusters: usize, seed: u64) -> Result<KMeansResult> {
    let n = data.rows();
    if n_clusters == 0 || n_clusters > n {
        return Err(Error::param(format!(
            "cannot form {n_clusters} clusters from {n} rows"
        )));
    }
    let mut rng = seed::rng(seed);
    let mut centroids = plus_plus_init(data, n_clusters, &mut rng);
    let mut assignments: Vec<usize> = Vec::new();
    let mut inertia_history = Vec::new();

    for _ in 0..MAX_ITER {
        let nearest = par::map_range(n, |i| nearest_centroid(&centroids, data.row(i)));
        let inertia: f64 = nearest.iter().map(|(_, d)| d).sum();
        let new_assignments: Vec<usize> = nearest.into_iter().map(|(c, _)| c).collect();
        let converged = new_assignments == assignments
            || inertia_history
                .last()
                .is_some_and(|&prev: &f64| prev - inertia <= REL_TOL * prev);
        assignments = new_assignments;
        inertia_history.push(inertia);
        if converged {
            break;
        }

        let mut sums = Matrix::zeros(n_clusters, data.cols());
        let mut counts = vec![0usize; n_clusters];
        for (row, &c) in data.row_iter().zip(&assignments) {
            counts[c] += 1;
            for (j, &v) in row.iter().enumerate() {
                sums.set(c, j, sums.get(c, j) + v);
            }
        }
        for (c, &count) in counts.iter().enumerate() {
            // empty clusters keep their previous centroid
            if count > 0 {
                for j in 0..data.cols() {
                    centroids.set(c, j, sums.get(c, j) / count as f64);
                }
            }
        }
    }
    Ok(KMeansResult {
        centroids,
        assignments,
        inertia_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_cluster_per_point_has_zero_inertia() {
        let data = Matrix::from_rows(&[vec![0.0, 1.0], vec![3.0, 1.0], vec![-2.0, 5.0], vec![4.0, 4.0]]).unwrap();
        let r = kmeans(&data, 4, 7).unwrap();
        assert_eq!(r.inertia(), 0.0);
    }

    #[test]
    fn duplicates_do_not_break_seeding() {
        let data = Matrix::from_rows(&vec![vec![1.0]; 5]).unwrap();
        let r = kmeans(&data, 3, 0).unwrap();
        assert_eq!(r.inertia(), 0.0);
    }

    #[test]
    fn degenerate_counts_rejected() {
        let data = Matrix::zeros(3, 1);
        assert!(kmeans(&data, 0, 0).is_err());
        assert!(kmeans(&data, 4, 0).is_err());
    }
}
