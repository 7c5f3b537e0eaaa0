use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    RocAuc,
    PrAuc,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::RocAuc => "roc_auc",
            Metric::PrAuc => "pr_auc",
        }
    }

    pub fn evaluate(self, scores: &[f64], labels: &[u8]) -> Result<f64> {
        match self {
            Metric::RocAuc => roc_auc(scores, labels),
            Metric::PrAuc => pr_auc(scores, labels),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "roc_auc" | "roc-auc" => Ok(Metric::RocAuc),
            "pr_auc" | "pr-auc" => Ok(Metric::PrAuc),
            other => Err(Error::param(format!(
                "unknown metric \"{other}\" (expected roc_auc or pr_auc)"
            ))),
        }
    }
}

fn check_lengths(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            actual: labels.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::UndefinedMetric("scores contain non-finite values".into()));
    }
    Ok(())
}

/// Indices sorted by descending score; ties keep index order.
fn descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// Tied-score blocks in descending score order, as (positives, negatives).
fn blocks(scores: &[f64], labels: &[u8]) -> Vec<(usize, usize)> {
    let order = descending(scores);
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut prev: Option<f64> = None;
    for i in order {
        if prev != Some(scores[i]) {
            out.push((0, 0));
            prev = Some(scores[i]);
        }
        let block = out.last_mut().expect("block opened above");
        if labels[i] == 1 {
            block.0 += 1;
        } else {
            block.1 += 1;
        }
    }
    out
}

/// Area under the ROC curve: the probability that a random outlier scores
/// above a random inlier, ties counting one half.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_lengths(scores, labels)?;
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedMetric(
            "ROC-AUC needs both outliers and inliers".into(),
        ));
    }
    // walk blocks from the top; every positive beats the negatives below it
    let mut negatives_below = n_neg as f64;
    let mut wins = 0.0;
    for (pos, neg) in blocks(scores, labels) {
        negatives_below -= neg as f64;
        wins += pos as f64 * (negatives_below + 0.5 * neg as f64);
    }
    Ok(wins / (n_pos as f64 * n_neg as f64))
}

/// Average precision: step-wise sum of `Δrecall · precision` over
/// descending score thresholds, each block of tied scores forming one
/// threshold.
pub fn pr_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_lengths(scores, labels)?;
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    if n_pos == 0 {
        return Err(Error::UndefinedMetric("PR-AUC needs at least one outlier".into()));
    }
    let (mut tp, mut seen, mut ap) = (0usize, 0usize, 0.0);
    for (pos, neg) in blocks(scores, labels) {
        tp += pos;
        seen += pos + neg;
        if pos > 0 {
            ap += (pos as f64 / n_pos as f64) * (tp as f64 / seen as f64);
        }
    }
    Ok(ap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roc_examples() {
        assert_eq!(roc_auc(&[0.9, 0.8, 0.1, 0.2], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.3; 6], &[1, 0, 0, 1, 0, 0]).unwrap(), 0.5);
        assert_eq!(roc_auc(&[0.1, 0.2, 0.9, 0.8], &[1, 1, 0, 0]).unwrap(), 0.0);
        assert!(roc_auc(&[0.1, 0.2], &[1, 1]).is_err());
        assert!(roc_auc(&[0.1], &[1, 0]).is_err());
    }

    #[test]
    fn pr_examples() {
        assert_eq!(pr_auc(&[0.9, 0.8, 0.1, 0.2], &[1, 1, 0, 0]).unwrap(), 1.0);
        // constant scores give the prevalence
        assert_eq!(pr_auc(&[1.0; 8], &[1, 0, 0, 0, 1, 0, 0, 0]).unwrap(), 0.25);
        // ranking: pos, neg, pos -> (1/2)(1) + (1/2)(2/3)
        let ap = pr_auc(&[3.0, 2.0, 1.0], &[1, 0, 1]).unwrap();
        assert!((ap - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
        assert!(pr_auc(&[1.0, 2.0], &[0, 0]).is_err());
    }

    #[test]
    fn metric_names_parse() {
        assert_eq!("roc_auc".parse::<Metric>().unwrap(), Metric::RocAuc);
        assert_eq!("pr-auc".parse::<Metric>().unwrap(), Metric::PrAuc);
        assert!("f1".parse::<Metric>().is_err());
    }
}
