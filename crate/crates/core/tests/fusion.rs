mod common;

use proptest::prelude::*;
use recol_core::data::{SplitSpec, SyntheticLinear};
use recol_core::eval::{ExperimentConfig, Metric, Prepared, ScorerSpec};
use recol_core::fusion::{recol_od, FusionSpec};
use recol_core::recol::RecolConfig;
use recol_core::Matrix;

use common::{random_matrix, rng};

/// Min-max each column with train bounds, then average, in one pass.
fn oracle(train: &Matrix, eval: &Matrix) -> Vec<f64> {
    (0..eval.rows())
        .map(|i| {
            let mut total = 0.0;
            for j in 0..eval.cols() {
                let col = train.column(j);
                let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let span = if hi > lo { hi - lo } else { 1.0 };
                total += (eval.get(i, j) - lo) / span;
            }
            total / eval.cols() as f64
        })
        .collect()
}

fn permute_columns(m: &Matrix, order: &[usize]) -> Matrix {
    m.select_columns(order)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_summation_oracle(seed in 0u64..10_000, n in 2usize..60, d in 1usize..8) {
        let mut r = rng(seed);
        let train = random_matrix(&mut r, n, d).map(|v| v * v);
        let eval = random_matrix(&mut r, 10, d).map(|v| v * v * 2.0);
        let got = recol_od(&train, &eval, &FusionSpec::default()).unwrap().scores;
        for (a, b) in got.iter().zip(oracle(&train, &eval)) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn column_order_does_not_matter(seed in 0u64..10_000, d in 2usize..8) {
        let mut r = rng(seed);
        let train = random_matrix(&mut r, 30, d);
        let eval = random_matrix(&mut r, 10, d);
        let order: Vec<usize> = (0..d).rev().collect();
        let a = recol_od(&train, &eval, &FusionSpec::default()).unwrap().scores;
        let b = recol_od(&permute_columns(&train, &order), &permute_columns(&eval, &order), &FusionSpec::default()).unwrap().scores;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn raising_one_value_never_lowers_the_score(seed in 0u64..10_000, d in 1usize..6, bump in 0.0f64..5.0, col in 0usize..6) {
        let mut r = rng(seed);
        let train = random_matrix(&mut r, 20, d);
        let eval = random_matrix(&mut r, 5, d);
        let mut raised = eval.clone();
        let j = col % d;
        raised.set(2, j, eval.get(2, j) + bump);
        let a = recol_od(&train, &eval, &FusionSpec::default()).unwrap().scores;
        let b = recol_od(&train, &raised, &FusionSpec::default()).unwrap().scores;
        prop_assert!(b[2] >= a[2]);
    }
}

#[test]
fn strong_on_the_synthetic_band() {
    let mut good = 0;
    for seed in 0..10 {
        let t = SyntheticLinear {
            n: 2000,
            seed,
            ..SyntheticLinear::default()
        }
        .generate()
        .unwrap();
        let cfg = ExperimentConfig {
            dataset: "band".into(),
            split: SplitSpec {
                seed,
                ..SplitSpec::default()
            },
            scorer: ScorerSpec::RecolOd(FusionSpec::default()),
            recol: RecolConfig::default(),
            metric: Metric::RocAuc,
        };
        let p = Prepared::new(&t, &cfg.split).unwrap();
        let ms = p.fit_recols(&cfg.recol).unwrap();
        let r = p.run(&cfg, Some(&ms)).unwrap();
        good += usize::from(r.test_roc_auc > 0.9);
    }
    assert!(good >= 9, "{good}/10 seeds above 0.9");
}
