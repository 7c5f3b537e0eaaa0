mod common;

use proptest::prelude::*;
use recol_core::data::{train_test_split, Scaler, ScalerKind, SplitSpec, SyntheticLinear, Table};

use common::{random_matrix, rng};

fn table(seed: u64, n: usize, d: usize) -> Table {
    let m = random_matrix(&mut rng(seed), n, d);
    let labels = (0..n).map(|i| u8::from(i % 7 == 0)).collect();
    Table::new((0..d).map(|j| format!("c{j}")).collect(), (0..d).map(|j| m.column(j)).collect(), Some(labels)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_is_deterministic(seed in any::<u64>(), n in 2usize..200, f in 0.05f64..0.95) {
        let t = table(seed, n, 2);
        let spec = SplitSpec { train_fraction: f, seed, stratified: false };
        match (spec.apply(&t), spec.apply(&t)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "split outcome differs between runs"),
        }
    }

    #[test]
    fn scaler_ignores_test_rows(seed in any::<u64>(), n in 4usize..100, standard: bool) {
        let t = table(seed, n, 3);
        let kind = if standard { ScalerKind::Standard } else { ScalerKind::Minmax };
        let split = train_test_split(&t, 0.5, seed).unwrap();
        // overwrite every test row with unrelated values
        let noise = table(seed ^ 0xdead, n, 3);
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|j| {
                let mut c = t.column(j).to_vec();
                for &i in &split.test_rows {
                    c[i] = noise.column(j)[i] * 1000.0;
                }
                c
            })
            .collect();
        let altered = Table::new(t.names().to_vec(), cols, t.labels().map(<[u8]>::to_vec)).unwrap();
        let resplit = train_test_split(&altered, 0.5, seed).unwrap();
        prop_assert_eq!(&resplit.train_rows, &split.train_rows);
        prop_assert_eq!(Scaler::fit(&split.train, kind), Scaler::fit(&resplit.train, kind));
    }

    #[test]
    fn synthetic_labels_match_band_membership(seed in any::<u64>(), sigma in 0.0001f64..0.5, slope in -3.0f64..3.0, frac in 0.01f64..0.4) {
        let params = SyntheticLinear { n: 300, seed, noise_sigma: sigma, slope, intercept: 0.5, outlier_fraction: frac, ..SyntheticLinear::default() };
        let t = params.generate().unwrap();
        let labels = t.labels().unwrap();
        prop_assert_eq!(labels.iter().filter(|&&l| l == 1).count(), params.n_outliers());
        for (i, &label) in labels.iter().enumerate() {
            let residual = t.column(1)[i] - (slope * t.column(0)[i] + 0.5);
            let outside = residual.abs() > 2.0 * sigma;
            prop_assert_eq!(outside, label == 1, "row {} residual {}", i, residual);
        }
    }
}
