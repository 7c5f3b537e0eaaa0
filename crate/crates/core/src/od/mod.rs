//! Unsupervised outlier scorers. Every scorer is fitted on a training
//! feature matrix and returns higher scores for more outlying rows.
//!
//! Training-set scores (used for model selection) leave each point out of
//! its own neighbourhood for the kNN family and LOF; otherwise every
//! training point would be its own nearest neighbour at distance 0.

mod cluster;
mod hbos;
mod iforest;
mod kmeans;
mod neighbors;

use serde::{Deserialize, Serialize};

pub use cluster::{large_clusters, ClusterScore, ClusterScorer};
pub use hbos::Hbos;
pub use iforest::{c_factor, IsolationForest};
pub use kmeans::{kmeans, nearest_centroid, KMeansResult};
pub use neighbors::{k_nearest, knn_scores, neighbor_lists, KnnScore, Lof, Neighbor};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::recol::FeatureMatrix;

fn default_k() -> usize {
    10
}
fn default_trees() -> usize {
    100
}
fn default_subsample() -> usize {
    256
}
fn default_clusters() -> usize {
    8
}
fn default_alpha() -> f64 {
    0.9
}
fn default_beta() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OdSpec {
    KnnMean {
        #[serde(default = "default_k")]
        k: usize,
    },
    KthNn {
        #[serde(default = "default_k")]
        k: usize,
    },
    Lof {
        #[serde(default = "default_k")]
        k: usize,
    },
    Hbos {
        /// Defaults to `ceil(sqrt(n_train))`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_bins: Option<usize>,
    },
    Iforest {
        #[serde(default = "default_trees")]
        n_trees: usize,
        /// Capped at the number of training rows.
        #[serde(default = "default_subsample")]
        subsample_size: usize,
        #[serde(default)]
        seed: u64,
    },
    Ucblof {
        #[serde(default = "default_clusters")]
        n_clusters: usize,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default)]
        seed: u64,
    },
    Ldcof {
        #[serde(default = "default_clusters")]
        n_clusters: usize,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default)]
        seed: u64,
    },
}

impl OdSpec {
    pub fn name(&self) -> &'static str {
        match self {
            OdSpec::KnnMean { .. } => "knn_mean",
            OdSpec::KthNn { .. } => "kth_nn",
            OdSpec::Lof { .. } => "lof",
            OdSpec::Hbos { .. } => "hbos",
            OdSpec::Iforest { .. } => "iforest",
            OdSpec::Ucblof { .. } => "ucblof",
            OdSpec::Ldcof { .. } => "ldcof",
        }
    }

    /// Every implemented scorer with its default parameters.
    pub fn all_defaults() -> Vec<OdSpec> {
        ["knn_mean", "kth_nn", "lof", "hbos", "iforest", "ucblof", "ldcof"]
            .iter()
            .map(|k| serde_json::from_value(serde_json::json!({ "kind": k })).expect("known kind"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            OdSpec::KnnMean { k } | OdSpec::KthNn { k } | OdSpec::Lof { k } if k == 0 => {
                Err(Error::param("k must be >= 1"))
            }
            OdSpec::Hbos { n_bins: Some(0) } => Err(Error::param("n_bins must be >= 1")),
            OdSpec::Iforest {
                n_trees,
                subsample_size,
                ..
            } if n_trees == 0 || subsample_size < 2 => {
                Err(Error::param("iforest needs n_trees >= 1 and subsample_size >= 2"))
            }
            OdSpec::Ucblof {
                n_clusters,
                alpha,
                beta,
                ..
            }
            | OdSpec::Ldcof {
                n_clusters,
                alpha,
                beta,
                ..
            } if n_clusters == 0 || !(alpha > 0.0 && alpha < 1.0) || !(beta > 1.0) => Err(
                Error::param("cluster scorers need n_clusters >= 1, 0 < alpha < 1, beta > 1"),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierScores {
    pub scorer: String,
    /// Higher means more outlying.
    pub scores: Vec<f64>,
}

/// A scorer fitted on training data.
#[derive(Debug, Clone)]
pub enum Detector {
    Knn {
        train: Matrix,
        k: usize,
        mode: KnnScore,
    },
    Lof(Lof),
    Hbos(Hbos),
    Iforest(IsolationForest),
    Cluster(ClusterScorer),
}

impl Detector {
    pub fn fit(spec: &OdSpec, train: &Matrix) -> Result<Detector> {
        spec.validate()?;
        let n = train.rows();
        if n == 0 {
            return Err(Error::param("cannot fit a scorer on an empty training set"));
        }
        let check_k = |k: usize| {
            if k >= n {
                Err(Error::param(format!("k = {k} must be smaller than the {n} training rows")))
            } else {
                Ok(())
            }
        };
        Ok(match *spec {
            OdSpec::KnnMean { k } => {
                check_k(k)?;
                Detector::Knn {
                    train: train.clone(),
                    k,
                    mode: KnnScore::Mean,
                }
            }
            OdSpec::KthNn { k } => {
                check_k(k)?;
                Detector::Knn {
                    train: train.clone(),
                    k,
                    mode: KnnScore::Kth,
                }
            }
            OdSpec::Lof { k } => {
                check_k(k)?;
                Detector::Lof(Lof::fit(train, k))
            }
            OdSpec::Hbos { n_bins } => {
                Detector::Hbos(Hbos::fit(train, n_bins.unwrap_or_else(|| Hbos::default_bins(n))))
            }
            OdSpec::Iforest {
                n_trees,
                subsample_size,
                seed,
            } => Detector::Iforest(IsolationForest::fit(train, n_trees, subsample_size, seed)?),
            OdSpec::Ucblof {
                n_clusters,
                alpha,
                beta,
                seed,
            } => Detector::Cluster(ClusterScorer::fit(
                train,
                n_clusters,
                alpha,
                beta,
                seed,
                ClusterScore::Unweighted,
            )?),
            OdSpec::Ldcof {
                n_clusters,
                alpha,
                beta,
                seed,
            } => Detector::Cluster(ClusterScorer::fit(
                train,
                n_clusters,
                alpha,
                beta,
                seed,
                ClusterScore::LocalDensity,
            )?),
        })
    }

    pub fn width(&self) -> usize {
        match self {
            Detector::Knn { train, .. } => train.cols(),
            Detector::Lof(l) => l.width(),
            Detector::Hbos(h) => h.width(),
            Detector::Iforest(f) => f.width(),
            Detector::Cluster(c) => c.clustering.centroids.cols(),
        }
    }

    pub fn score(&self, eval: &Matrix) -> Result<Vec<f64>> {
        if eval.rows() == 0 {
            return Err(Error::param("nothing to score: evaluation set is empty"));
        }
        if eval.cols() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                actual: eval.cols(),
            });
        }
        Ok(match self {
            Detector::Knn { train, k, mode } => {
                knn_scores(&neighbor_lists(train, eval, *k, false), *mode)
            }
            Detector::Lof(l) => l.score(eval),
            Detector::Hbos(h) => h.score(eval),
            Detector::Iforest(f) => f.score(eval),
            Detector::Cluster(c) => c.score(eval),
        })
    }

    /// Scores for the rows the detector was fitted on, leaving each row out
    /// of its own neighbourhood where that matters.
    pub fn score_train(&self, train: &Matrix) -> Result<Vec<f64>> {
        match self {
            Detector::Knn { train: t, k, mode } => Ok(knn_scores(&neighbor_lists(t, t, *k, true), *mode)),
            Detector::Lof(l) => Ok(l.score_train()),
            _ => self.score(train),
        }
    }
}

pub fn score(spec: &OdSpec, train: &FeatureMatrix, eval: &FeatureMatrix) -> Result<OutlierScores> {
    let detector = Detector::fit(spec, &train.matrix)?;
    Ok(OutlierScores {
        scorer: spec.name().to_owned(),
        scores: detector.score(&eval.matrix)?,
    })
}

pub fn score_train(spec: &OdSpec, train: &FeatureMatrix) -> Result<OutlierScores> {
    let detector = Detector::fit(spec, &train.matrix)?;
    Ok(OutlierScores {
        scorer: spec.name().to_owned(),
        scores: detector.score_train(&train.matrix)?,
    })
}
