//! One worker thread vs the full pool on the three hot paths. Build with
//! `--no-default-features` to compare against the rayon-free code path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recol_core::data::Table;
use recol_core::od::{Detector, OdSpec};
use recol_core::par;
use recol_core::recol::{fit_recols, RecolConfig};
use recol_core::regress::{fit, RandomForestParams, RegressorSpec};

fn table(n: usize, d: usize) -> Table {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let base: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let columns = (0..d)
        .map(|j| base.iter().map(|b| b * (j as f64 + 1.0) + rng.gen_range(-0.1..0.1)).collect())
        .collect();
    Table::new((0..d).map(|j| format!("c{j}")).collect(), columns, None).unwrap()
}

fn forest(n_trees: usize) -> RegressorSpec {
    RegressorSpec::RandomForest(RandomForestParams {
        n_trees,
        ..Default::default()
    })
}

fn thread_counts() -> [(&'static str, usize); 2] {
    [("sequential", 1), ("parallel", par::available_threads())]
}

fn bench_recols(c: &mut Criterion) {
    let t = table(1000, 8);
    let cfg = RecolConfig {
        regressor: forest(20),
        ..RecolConfig::default()
    };
    let mut group = c.benchmark_group("fit_recols");
    group.sample_size(10);
    for (name, threads) in thread_counts() {
        group.bench_function(BenchmarkId::new(name, threads), |b| {
            b.iter(|| par::with_threads(threads, || fit_recols(black_box(&t), &cfg).unwrap()))
        });
    }
    group.finish();
}

fn bench_knn(c: &mut Criterion) {
    let m = table(2000, 8).to_matrix();
    let det = Detector::fit(&OdSpec::KthNn { k: 10 }, &m).unwrap();
    let mut group = c.benchmark_group("kth_nn_score");
    group.sample_size(10);
    for (name, threads) in thread_counts() {
        group.bench_function(BenchmarkId::new(name, threads), |b| {
            b.iter(|| par::with_threads(threads, || det.score(black_box(&m)).unwrap()))
        });
    }
    group.finish();
}

fn bench_forest(c: &mut Criterion) {
    let t = table(2000, 8);
    let x = t.to_matrix().select_columns(&[0, 1, 2, 3, 4, 5, 6]);
    let y = t.column(7).to_vec();
    let spec = forest(50);
    let mut group = c.benchmark_group("random_forest_fit");
    group.sample_size(10);
    for (name, threads) in thread_counts() {
        group.bench_function(BenchmarkId::new(name, threads), |b| {
            b.iter(|| par::with_threads(threads, || fit(&spec, black_box(&x), &y).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_recols, bench_knn, bench_forest);
criterion_main!(benches);
