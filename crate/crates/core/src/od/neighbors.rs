//! Exact brute-force nearest-neighbour search and the distance-based
//! scorers built on it (mean kNN distance, k-th NN distance, LOF).

use std::cmp::Ordering;

use crate::matrix::{squared_euclidean, Matrix};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// The `k` nearest rows of `data` to `query`, nearest first, ties broken by
/// row index. `exclude` removes one row (the query itself when scoring the
/// training set).
pub fn k_nearest(data: &Matrix, query: &[f64], k: usize, exclude: Option<usize>) -> Vec<Neighbor> {
    let mut d: Vec<(f64, usize)> = data
        .row_iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .map(|(i, row)| (squared_euclidean(row, query), i))
        .collect();
    let k = k.min(d.len());
    if k == 0 {
        return Vec::new();
    }
    if k < d.len() {
        d.select_nth_unstable_by(k - 1, by_distance_then_index);
        d.truncate(k);
    }
    d.sort_unstable_by(by_distance_then_index);
    d.into_iter()
        .map(|(sq, index)| Neighbor {
            index,
            distance: sq.sqrt(),
        })
        .collect()
}

/// Neighbour lists for every row of `queries`. With `leave_self_out`, row
/// `i` of `queries` is assumed to be row `i` of `data` and is skipped.
pub fn neighbor_lists(data: &Matrix, queries: &Matrix, k: usize, leave_self_out: bool) -> Vec<Vec<Neighbor>> {
    par::map_range(queries.rows(), |i| {
        k_nearest(data, queries.row(i), k, leave_self_out.then_some(i))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnnScore {
    Mean,
    Kth,
}

pub fn knn_scores(lists: &[Vec<Neighbor>], mode: KnnScore) -> Vec<f64> {
    lists
        .iter()
        .map(|nn| match mode {
            KnnScore::Mean => nn.iter().map(|n| n.distance).sum::<f64>() / nn.len() as f64,
            KnnScore::Kth => nn.last().map_or(0.0, |n| n.distance),
        })
        .collect()
}

/// Local outlier factor fitted on a training set. Exactly `k` neighbours
/// are used per point; training points never count themselves.
#[derive(Debug, Clone)]
pub struct Lof {
    train: Matrix,
    k: usize,
    train_neighbors: Vec<Vec<Neighbor>>,
    k_distance: Vec<f64>,
    lrd: Vec<f64>,
}

/// Keeps densities finite when all reachability distances vanish
/// (duplicate points).
const LRD_EPS: f64 = 1e-10;

impl Lof {
    pub fn fit(train: &Matrix, k: usize) -> Lof {
        let train_neighbors = neighbor_lists(train, train, k, true);
        let k_distance: Vec<f64> = train_neighbors
            .iter()
            .map(|nn| nn.last().map_or(0.0, |n| n.distance))
            .collect();
        let lrd = train_neighbors
            .iter()
            .map(|nn| local_density(nn, &k_distance))
            .collect();
        Lof {
            train: train.clone(),
            k,
            train_neighbors,
            k_distance,
            lrd,
        }
    }

    fn factor(&self, nn: &[Neighbor], own_lrd: f64) -> f64 {
        let mean_lrd = nn.iter().map(|n| self.lrd[n.index]).sum::<f64>() / nn.len() as f64;
        mean_lrd / own_lrd
    }

    pub fn width(&self) -> usize {
        self.train.cols()
    }

    pub fn score_train(&self) -> Vec<f64> {
        self.train_neighbors
            .iter()
            .zip(&self.lrd)
            .map(|(nn, &lrd)| self.factor(nn, lrd))
            .collect()
    }

    pub fn score(&self, eval: &Matrix) -> Vec<f64> {
        neighbor_lists(&self.train, eval, self.k, false)
            .iter()
            .map(|nn| self.factor(nn, local_density(nn, &self.k_distance)))
            .collect()
    }
}

fn local_density(nn: &[Neighbor], k_distance: &[f64]) -> f64 {
    let mean_reach = nn
        .iter()
        .map(|n| n.distance.max(k_distance[n.index]))
        .sum::<f64>()
        / nn.len() as f64;
    1.0 / (mean_reach + LRD_EPS)
}
