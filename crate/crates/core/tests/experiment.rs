use std::collections::HashSet;
use std::sync::Mutex;

use recol_core::data::{Scaler, ScalerKind, SplitSpec, SyntheticLinear, Table};
use recol_core::eval::{
    build_report, delta_report, read_results, run_experiment, run_grid, select_best, ExperimentConfig,
    ExperimentResult, GridSpec, Metric, Prepared, ReportStyle, ResultKind,
};
use recol_core::od::{Detector, OdSpec};
use recol_core::Error;

fn band(seed: u64, n: usize) -> Table {
    SyntheticLinear {
        n,
        seed,
        ..SyntheticLinear::default()
    }
    .generate()
    .unwrap()
}

fn cfg(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json_str(json).unwrap()
}

#[test]
fn baseline_pathway_is_plain_detector_on_scaled_features() {
    let t = band(1, 300);
    let c = cfg(r#"{"scorer":{"kind":"kth_nn","k":5},"recol":{"feature_mode":"original_only"}}"#);
    let r = run_experiment(&t, &c).unwrap();
    assert_eq!(r.kind, ResultKind::Baseline);
    assert_eq!(r.provenance.n_recols, 0);

    let split = SplitSpec::default().apply(&t).unwrap();
    let (train, test) = (split.train.without_labels(), split.test.without_labels());
    let scaler = Scaler::fit(&train, ScalerKind::Minmax);
    let det = Detector::fit(&OdSpec::KthNn { k: 5 }, &scaler.apply(&train).unwrap().to_matrix()).unwrap();
    let scores = det.score(&scaler.apply(&test).unwrap().to_matrix()).unwrap();
    let expected = recol_core::eval::roc_auc(&scores, split.test.labels().unwrap()).unwrap();
    assert_eq!(r.test_roc_auc, expected);
}

#[test]
fn identical_configs_give_identical_metrics() {
    let t = band(2, 300);
    let c = cfg(r#"{"scorer":{"kind":"iforest","n_trees":20},"recol":{"regressor":{"kind":"random_forest","n_trees":10}}}"#);
    let a = run_experiment(&t, &c).unwrap();
    let b = run_experiment(&t, &c).unwrap();
    assert_eq!(a.metrics().map(f64::to_bits), b.metrics().map(f64::to_bits));
    assert_eq!(a.config_hash, b.config_hash);
    assert!(a.metrics().iter().all(|m| (0.0..=1.0).contains(m)));
}

#[test]
fn fitting_views_carry_no_labels() {
    let t = band(3, 100);
    let p = Prepared::new(&t, &SplitSpec::default()).unwrap();
    assert!(p.train.labels().is_none());
    assert!(p.test.labels().is_none());
    assert!(Prepared::new(&t.without_labels(), &SplitSpec::default()).is_err());
}

#[test]
fn hash_ignores_key_order() {
    let a = cfg(r#"{"scorer":{"kind":"lof","k":3},"metric":"pr_auc"}"#);
    let b = cfg(r#"{"metric":"pr_auc","scorer":{"k":3,"kind":"lof"}}"#);
    assert_eq!(a.hash(), b.hash());
}

fn fake(hash: &str, train: f64, test: f64) -> ExperimentResult {
    let t = band(4, 400);
    let mut r = run_experiment(&t, &cfg(r#"{"scorer":{"kind":"hbos"},"recol":{"feature_mode":"original_only"}}"#)).unwrap();
    r.config_hash = hash.into();
    r.train_roc_auc = train;
    r.test_roc_auc = test;
    r
}

#[test]
fn selection_reports_the_test_value_of_the_train_winner() {
    let rs = [fake("b", 0.9, 0.1), fake("a", 0.8, 0.99)];
    let best = select_best(&rs, Metric::RocAuc).unwrap();
    assert_eq!(best.config_hash, "b");
    assert_eq!(best.test_roc_auc, 0.1);
    let tied = [fake("b", 0.9, 0.1), fake("a", 0.9, 0.2)];
    assert_eq!(select_best(&tied, Metric::RocAuc).unwrap().config_hash, "a");
    assert!(select_best(&[], Metric::RocAuc).is_err());
}

const SMALL_GRID: &str = r#"{
    "dataset": "band",
    "regressors": [{"kind": "linear"}],
    "clipping": [false, true],
    "feature_modes": ["combined"],
    "scorers": [{"kind": "kth_nn", "k": 5}, {"kind": "recol-od"}]
}"#;

#[test]
fn grid_runs_the_cross_product_and_resumes() {
    let t = band(5, 200);
    let grid = GridSpec::from_json_str(SMALL_GRID).unwrap();
    assert_eq!(grid.recol_recipe_count(), 2);
    let configs = grid.expand().unwrap();
    assert_eq!(configs.len(), 4);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.jsonl");
    let file = std::fs::File::create(&path).unwrap();
    let sink: Mutex<std::fs::File> = Mutex::new(file);
    let first = run_grid(&t, &configs[..3], 2, &HashSet::new(), Some(&sink)).unwrap();
    assert_eq!(first.results.len(), 3);

    let done: HashSet<String> = read_results(&path).unwrap().into_iter().map(|r| r.config_hash).collect();
    let second = run_grid(&t, &configs, 2, &done, Some(&sink)).unwrap();
    assert_eq!((second.skipped, second.results.len()), (3, 1));

    let all = read_results(&path).unwrap();
    let hashes: HashSet<&str> = all.iter().map(|r| r.config_hash.as_str()).collect();
    assert_eq!((all.len(), hashes.len()), (4, 4));
}

#[test]
fn empty_axis_is_an_error() {
    let grid = GridSpec::from_json_str(r#"{"clipping": [], "scorers": [{"kind": "hbos"}]}"#).unwrap();
    assert!(matches!(grid.expand(), Err(Error::Config { ref path, .. }) if path == "clipping"));
}

#[test]
fn reports_need_aligned_datasets() {
    let t = band(6, 200);
    let base = cfg(r#"{"dataset":"a","scorer":{"kind":"kth_nn","k":5},"recol":{"feature_mode":"original_only"}}"#);
    let r = run_experiment(&t, &base).unwrap();
    let mut twin = r.clone();
    twin.kind = ResultKind::Combined;
    let rows = delta_report(&[r.clone(), twin], ResultKind::Baseline, ResultKind::Combined, Metric::RocAuc).unwrap();
    assert!(rows.iter().all(|row| row.delta.0 == 0));

    let mut elsewhere = r.clone();
    elsewhere.kind = ResultKind::Combined;
    elsewhere.dataset = "b".into();
    assert!(delta_report(&[r.clone(), elsewhere], ResultKind::Baseline, ResultKind::Combined, Metric::RocAuc).is_err());
    assert!(build_report(&[], Metric::RocAuc, ReportStyle::BestVsBest).is_err());
}

#[test]
fn recol_od_report_layout() {
    let t = band(7, 300);
    let results: Vec<ExperimentResult> = [
        r#"{"dataset":"band","scorer":{"kind":"kth_nn","k":5},"recol":{"feature_mode":"original_only"}}"#,
        r#"{"dataset":"band","scorer":{"kind":"hbos"},"recol":{"feature_mode":"original_only"}}"#,
        r#"{"dataset":"band","scorer":{"kind":"recol-od"},"recol":{"regressor":{"kind":"linear"}}}"#,
    ]
    .iter()
    .map(|j| run_experiment(&t, &cfg(j)).unwrap())
    .collect();
    let report = build_report(&results, Metric::RocAuc, ReportStyle::RecolOdVsAvg).unwrap();
    assert_eq!(
        report.headers,
        ["Dataset", "Best Baseline", "Avg. Baseline", "RECol-OD", "Δ to Best", "Δ to Avg."]
    );
    assert_eq!(report.rows.len(), 1);
    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    assert!(String::from_utf8(csv).unwrap().starts_with("Dataset,Best Baseline"));
}
