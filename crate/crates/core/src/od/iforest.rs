//! Isolation forest.

use rand::Rng as _;
use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::{par, seed};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Average path length of an unsuccessful binary-search-tree lookup among
/// `n` points; normalises isolation depths.
pub fn c_factor(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param(format!("c_factor needs n >= 2, got {n}")));
    }
    Ok(path_norm(n))
}

fn path_norm(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let m = n - 1;
    // Exact for small counts, ln + gamma beyond that as in the original
    // isolation forest formulation.
    let harmonic = if m <= 10 {
        (1..=m).map(|i| 1.0 / i as f64).sum::<f64>()
    } else {
        (m as f64).ln() + EULER_GAMMA
    };
    2.0 * harmonic - 2.0 * (n - 1) as f64 / n as f64
}

#[derive(Debug, Clone)]
enum INode {
    Leaf {
        size: usize,
    },
    Split {
        feature: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct ITree {
    nodes: Vec<INode>,
}

impl ITree {
    fn build(data: &Matrix, rows: Vec<usize>, height_limit: usize, rng: &mut seed::Rng) -> ITree {
        let mut tree = ITree { nodes: Vec::new() };
        tree.grow(data, rows, 0, height_limit, rng);
        tree
    }

    fn grow(
        &mut self,
        data: &Matrix,
        rows: Vec<usize>,
        depth: usize,
        limit: usize,
        rng: &mut seed::Rng,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(INode::Leaf { size: rows.len() });
        if depth >= limit || rows.len() <= 1 {
            return id;
        }
        let ranges: Vec<(usize, f64, f64)> = (0..data.cols())
            .filter_map(|f| {
                let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let v = data.get(i, f);
                    (lo.min(v), hi.max(v))
                });
                (hi > lo).then_some((f, lo, hi))
            })
            .collect();
        if ranges.is_empty() {
            return id;
        }
        let (feature, lo, hi) = ranges[rng.gen_range(0..ranges.len())];
        let value = rng.gen_range(lo..hi);
        let (l, r): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&i| data.get(i, feature) < value);
        let left = self.grow(data, l, depth + 1, limit, rng);
        let right = self.grow(data, r, depth + 1, limit, rng);
        self.nodes[id] = INode::Split {
            feature,
            value,
            left,
            right,
        };
        id
    }

    fn path_length(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        let mut depth = 0.0;
        loop {
            match self.nodes[at] {
                INode::Leaf { size } => return depth + path_norm(size),
                INode::Split {
                    feature,
                    value,
                    left,
                    right,
                } => {
                    at = if row[feature] < value { left } else { right };
                    depth += 1.0;
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsolationForest {
    trees: Vec<ITree>,
    subsample_size: usize,
    width: usize,
}

impl IsolationForest {
    pub fn fit(train: &Matrix, n_trees: usize, subsample_size: usize, seed: u64) -> Result<Self> {
        let n = train.rows();
        let psi = subsample_size.min(n);
        if psi < 2 {
            return Err(Error::param("isolation forest needs at least 2 training rows"));
        }
        let limit = (psi as f64).log2().ceil() as usize;
        let trees = par::map_range(n_trees, |t| {
            let mut rng = seed::rng(seed::derive(seed, t as u64));
            let mut rows = sample(&mut rng, n, psi).into_vec();
            rows.sort_unstable();
            ITree::build(train, rows, limit, &mut rng)
        });
        Ok(IsolationForest {
            trees,
            subsample_size: psi,
            width: train.cols(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn score(&self, eval: &Matrix) -> Vec<f64> {
        let norm = path_norm(self.subsample_size);
        par::map_range(eval.rows(), |i| {
            let row = eval.row(i);
            let mean = self.trees.iter().map(|t| t.path_length(row)).sum::<f64>() / self.trees.len() as f64;
            2f64.powf(-mean / norm)
        })
    }
}
