//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recol_core::Matrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// O(n²) Mann–Whitney: P(outlier > inlier) + ½ P(tie).
pub fn pairwise_roc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] == 1 && labels[j] == 0 {
                pairs += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

/// Average precision by enumerating every distinct score as a threshold
/// (predict outlier when score >= t), highest threshold first.
pub fn sweep_pr(scores: &[f64], labels: &[u8]) -> f64 {
    let positives = labels.iter().filter(|&&l| l == 1).count() as f64;
    let mut thresholds = scores.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let mut prev_recall = 0.0;
    let mut ap = 0.0;
    for t in thresholds {
        let (mut tp, mut predicted) = (0.0, 0.0);
        for (s, l) in scores.iter().zip(labels) {
            if *s >= t {
                predicted += 1.0;
                if *l == 1 {
                    tp += 1.0;
                }
            }
        }
        let recall = tp / positives;
        ap += (recall - prev_recall) * (tp / predicted);
        prev_recall = recall;
    }
    ap
}

/// Random scores drawn from a small alphabet so ties are frequent, with
/// both classes present.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<u8>) {
    let n = rng.gen_range(2..=50);
    let levels = rng.gen_range(2..=n.max(3));
    let mut labels: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.3))).collect();
    labels[0] = 1;
    labels[1] = 0;
    let scores = (0..n)
        .map(|_| rng.gen_range(0..levels) as f64 / levels as f64)
        .collect();
    (scores, labels)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Indices of the k nearest train rows to `q`, optionally skipping one row.
fn knn(train: &Matrix, q: &[f64], k: usize, skip: Option<usize>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..train.rows()).filter(|&i| Some(i) != skip).collect();
    idx.sort_by(|&a, &b| {
        dist(train.row(a), q)
            .partial_cmp(&dist(train.row(b), q))
            .unwrap()
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

/// LOF straight from the definition. `skip` is the query's own train index
/// when scoring a train row.
pub fn brute_lof(train: &Matrix, q: &[f64], skip: Option<usize>, k: usize) -> f64 {
    let k_distance = |o: usize| {
        let nn = knn(train, train.row(o), k, Some(o));
        dist(train.row(o), train.row(nn[k - 1]))
    };
    let lrd = |point: &[f64], own: Option<usize>| {
        let nn = knn(train, point, k, own);
        let reach: f64 = nn
            .iter()
            .map(|&o| k_distance(o).max(dist(point, train.row(o))))
            .sum::<f64>()
            / k as f64;
        1.0 / reach
    };
    let nn = knn(train, q, k, skip);
    let mean_lrd = nn.iter().map(|&o| lrd(train.row(o), Some(o))).sum::<f64>() / k as f64;
    mean_lrd / lrd(q, skip)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::new(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
