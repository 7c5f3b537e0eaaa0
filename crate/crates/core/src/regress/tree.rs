//! CART regression trees with variance-reduction splits.
//!
//! Candidate splits are scanned feature by feature in ascending index order
//! and, within a feature, by ascending threshold; a candidate replaces the
//! incumbent only on a strictly larger gain. Ties therefore resolve to the
//! lowest feature index and then the lowest threshold.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::seed::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
        n_samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features drawn per node; `None` scans all of them.
    pub max_features: Option<usize>,
}

impl Tree {
    /// Fits on the rows listed in `samples` (duplicates allowed, they act as
    /// weights). `rng` is only consulted for per-node feature subsampling.
    pub(crate) fn fit(
        x: &Matrix,
        y: &[f64],
        samples: Vec<usize>,
        params: TreeParams,
        rng: &mut Rng,
    ) -> Tree {
        let mut builder = Builder {
            x,
            y,
            params,
            rng,
            nodes: Vec::new(),
        };
        builder.grow(samples, 0);
        Tree {
            nodes: builder.nodes,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Features referenced by split nodes.
    pub fn used_features(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, .. } => Some(*feature),
            Node::Leaf { .. } => None,
        })
    }
}

struct Builder<'a, 'r> {
    x: &'a Matrix,
    y: &'a [f64],
    params: TreeParams,
    rng: &'r mut Rng,
    nodes: Vec<Node>,
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_, '_> {
    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let n = samples.len();
        let sum: f64 = samples.iter().map(|&i| self.y[i]).sum();
        let mean = sum / n as f64;
        self.nodes.push(Node::Leaf {
            value: mean,
            n_samples: n,
        });

        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        let min_leaf = self.params.min_samples_leaf.max(1);
        if !depth_ok || n < 2 * min_leaf {
            return id;
        }
        let sse: f64 = samples
            .iter()
            .map(|&i| (self.y[i] - mean) * (self.y[i] - mean))
            .sum();
        if sse <= 0.0 {
            return id;
        }

        let Some(best) = self.best_split(&samples, sum, min_leaf) else {
            return id;
        };
        if best.gain <= 1e-12 * sse {
            return id;
        }

        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&i| self.x.get(i, best.feature) <= best.threshold);
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: l,
            right: r,
        };
        id
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.cols();
        match self.params.max_features {
            Some(m) if m < d => {
                let mut f = sample(self.rng, d, m.max(1)).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, samples: &[usize], total: f64, min_leaf: usize) -> Option<Candidate> {
        let n = samples.len();
        let nf = n as f64;
        let parent_term = total * total / nf;
        let mut best: Option<Candidate> = None;
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);

        for f in self.candidate_features() {
            pairs.clear();
            pairs.extend(samples.iter().map(|&i| (self.x.get(i, f), self.y[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            if pairs[0].0 == pairs[n - 1].0 {
                continue;
            }
            let mut left_sum = 0.0;
            for k in 1..n {
                left_sum += pairs[k - 1].1;
                if k < min_leaf || n - k < min_leaf || pairs[k - 1].0 == pairs[k].0 {
                    continue;
                }
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / k as f64
                    + right_sum * right_sum / (n - k) as f64
                    - parent_term;
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    let (lo, hi) = (pairs[k - 1].0, pairs[k].0);
                    let mid = lo + (hi - lo) / 2.0;
                    best = Some(Candidate {
                        gain,
                        feature: f,
                        threshold: if mid < hi { mid } else { lo },
                    });
                }
            }
        }
        best
    }
}
