use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::par;
use crate::regress::tree::{Tree, TreeParams};
use crate::seed;

/// Row sample for one ensemble member, sorted so that summation order inside
/// the tree builder does not depend on the draw order.
pub(crate) fn draw_rows(n: usize, subsample: Option<f64>, rng: &mut seed::Rng) -> Vec<usize> {
    let mut rows = match subsample {
        None => (0..n).map(|_| rng.gen_range(0..n)).collect(),
        Some(f) if f >= 1.0 => (0..n).collect(),
        Some(f) => {
            let k = ((f * n as f64).round() as usize).clamp(1, n);
            sample(rng, n, k).into_vec()
        }
    };
    rows.sort_unstable();
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    pub(crate) fn fit(
        x: &Matrix,
        y: &[f64],
        n_trees: usize,
        subsample: Option<f64>,
        params: TreeParams,
        seed: u64,
    ) -> Forest {
        let trees = par::map_range(n_trees, |t| {
            let mut rng = seed::rng(seed::derive(seed, t as u64));
            let rows = draw_rows(x.rows(), subsample, &mut rng);
            Tree::fit(x, y, rows, params, &mut rng)
        });
        Forest { trees }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
        sum / self.trees.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boosted {
    pub init: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    /// Mean squared training error before any stage and after each stage.
    pub train_loss: Vec<f64>,
}

impl Boosted {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn fit(
        x: &Matrix,
        y: &[f64],
        n_trees: usize,
        learning_rate: f64,
        subsample: f64,
        params: TreeParams,
        seed: u64,
    ) -> Boosted {
        let n = y.len();
        let init = y.iter().sum::<f64>() / n as f64;
        let mut fitted = vec![init; n];
        let loss = |f: &[f64]| y.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n as f64;
        let mut train_loss = vec![loss(&fitted)];
        let mut trees = Vec::with_capacity(n_trees);
        if learning_rate == 0.0 {
            return Boosted {
                init,
                learning_rate,
                trees,
                train_loss,
            };
        }
        let mut residual = vec![0.0; n];
        for stage in 0..n_trees {
            for i in 0..n {
                residual[i] = y[i] - fitted[i];
            }
            let mut rng = seed::rng(seed::derive(seed, stage as u64));
            let rows = draw_rows(n, Some(subsample), &mut rng);
            let tree = Tree::fit(x, &residual, rows, params, &mut rng);
            for (i, f) in fitted.iter_mut().enumerate() {
                *f += learning_rate * tree.predict_row(x.row(i));
            }
            train_loss.push(loss(&fitted));
            trees.push(tree);
        }
        Boosted {
            init,
            learning_rate,
            trees,
            train_loss,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.trees
            .iter()
            .fold(self.init, |acc, t| acc + self.learning_rate * t.predict_row(row))
    }
}
