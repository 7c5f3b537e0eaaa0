use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::Table;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub train: Table,
    pub test: Table,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub seed: u64,
    pub train_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default)]
    pub seed: u64,
    /// Split each label class separately so both halves keep the
    /// contamination rate. Requires a labeled table.
    #[serde(default)]
    pub stratified: bool,
}

fn default_train_fraction() -> f64 {
    0.7
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: default_train_fraction(),
            seed: 0,
            stratified: false,
        }
    }
}

impl SplitSpec {
    pub fn apply(&self, t: &Table) -> Result<SplitResult> {
        if self.stratified {
            stratified_split(t, self.train_fraction, self.seed)
        } else {
            train_test_split(t, self.train_fraction, self.seed)
        }
    }
}

fn train_count(n: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::param(format!(
            "train fraction must lie in (0, 1), got {fraction}"
        )));
    }
    if n < 2 {
        return Err(Error::param(format!("cannot split a table with {n} rows")));
    }
    let n_train = (fraction * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::param(format!(
            "train fraction {fraction} of {n} rows leaves an empty train or test set"
        )));
    }
    Ok(n_train)
}

/// Uniform random permutation followed by a prefix split.
pub fn train_test_split(t: &Table, train_fraction: f64, seed: u64) -> Result<SplitResult> {
    let n = t.n_rows();
    let n_train = train_count(n, train_fraction)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let (train, test) = order.split_at(n_train);
    Ok(finish(t, train.to_vec(), test.to_vec(), seed, train_fraction))
}

pub fn stratified_split(t: &Table, train_fraction: f64, seed: u64) -> Result<SplitResult> {
    let labels = t
        .labels()
        .ok_or_else(|| Error::param("stratified split needs a labeled table"))?;
    train_count(t.n_rows(), train_fraction)?;
    let mut rng = seed::rng(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in [0u8, 1] {
        let mut rows: Vec<usize> = (0..t.n_rows()).filter(|&i| labels[i] == class).collect();
        rows.shuffle(&mut rng);
        let k = (train_fraction * rows.len() as f64).round() as usize;
        train.extend_from_slice(&rows[..k]);
        test.extend_from_slice(&rows[k..]);
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::param("stratified split left an empty train or test set"));
    }
    Ok(finish(t, train, test, seed, train_fraction))
}

fn finish(t: &Table, train: Vec<usize>, test: Vec<usize>, seed: u64, fraction: f64) -> SplitResult {
    SplitResult {
        train: t.select_rows(&train),
        test: t.select_rows(&test),
        train_rows: train,
        test_rows: test,
        seed,
        train_fraction: fraction,
    }
}
