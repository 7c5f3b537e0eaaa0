//! Cluster-based scorers on top of k-means: unweighted CBLOF and LDCOF.

use crate::error::Result;
use crate::matrix::{euclidean, Matrix};
use crate::od::kmeans::{kmeans, KMeansResult};

/// Large-cluster rule: order clusters by size (descending, ties by index)
/// and cut after the first position `b` where either the clusters so far
/// cover at least `alpha` of the points, or cluster `b` is at least `beta`
/// times larger than cluster `b + 1`. Returns the large cluster indices in
/// that order.
pub fn large_clusters(sizes: &[usize], alpha: f64, beta: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let total: usize = sizes.iter().sum();
    let mut covered = 0usize;
    for pos in 0..order.len() {
        covered += sizes[order[pos]];
        let coverage_reached = covered as f64 >= alpha * total as f64;
        let ratio_gap = order
            .get(pos + 1)
            .is_some_and(|&next| sizes[order[pos]] as f64 >= beta * sizes[next] as f64);
        if coverage_reached || ratio_gap {
            order.truncate(pos + 1);
            return order;
        }
    }
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterScore {
    /// Distance to the nearest large-cluster centroid.
    Unweighted,
    /// That distance divided by the cluster's mean member distance.
    LocalDensity,
}

#[derive(Debug, Clone)]
pub struct ClusterScorer {
    pub clustering: KMeansResult,
    pub large: Vec<usize>,
    /// Mean train-member distance to the centroid, per large cluster.
    pub mean_distance: Vec<f64>,
    mode: ClusterScore,
}

impl ClusterScorer {
    pub fn fit(
        train: &Matrix,
        n_clusters: usize,
        alpha: f64,
        beta: f64,
        seed: u64,
        mode: ClusterScore,
    ) -> Result<Self> {
        let clustering = kmeans(train, n_clusters, seed)?;
        let large = large_clusters(&clustering.sizes(), alpha, beta);
        let mut mean_distance: Vec<f64> = large
            .iter()
            .map(|&c| {
                let (sum, count) = train
                    .row_iter()
                    .zip(&clustering.assignments)
                    .filter(|(_, &a)| a == c)
                    .fold((0.0, 0usize), |(s, n), (row, _)| {
                        (s + euclidean(row, clustering.centroids.row(c)), n + 1)
                    });
                sum / count as f64
            })
            .collect();
        // a zero-spread cluster borrows the average spread of the others
        let positive: Vec<f64> = mean_distance.iter().copied().filter(|&d| d > 0.0).collect();
        let fallback = if positive.is_empty() {
            1.0
        } else {
            positive.iter().sum::<f64>() / positive.len() as f64
        };
        for d in &mut mean_distance {
            if *d <= 0.0 {
                *d = fallback;
            }
        }
        Ok(ClusterScorer {
            clustering,
            large,
            mean_distance,
            mode,
        })
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        let (slot, dist) = self
            .large
            .iter()
            .enumerate()
            .map(|(slot, &c)| (slot, euclidean(row, self.clustering.centroids.row(c))))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        match self.mode {
            ClusterScore::Unweighted => dist,
            ClusterScore::LocalDensity => dist / self.mean_distance[slot],
        }
    }

    pub fn score(&self, eval: &Matrix) -> Vec<f64> {
        eval.row_iter().map(|r| self.score_row(r)).collect()
    }
}
