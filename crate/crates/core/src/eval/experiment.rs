use std::time::Instant;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::data::{SplitResult, SplitSpec, Table};
use crate::error::{Error, Result};
use crate::eval::metrics::{pr_auc, roc_auc, Metric};
use crate::fusion::{self, recol_od, FusionSpec};
use crate::od::{Detector, OdSpec};
use crate::recol::{fit_recols, FeatureMode, FeatureSpace, RecolConfig, RecolModelSet};

/// Any scorer an experiment can use: a classical outlier detector on a
/// feature space, or direct RECol fusion (`"kind": "recol-od"`).
#[derive(Debug, Clone, PartialEq)]
pub enum ScorerSpec {
    Od(OdSpec),
    RecolOd(FusionSpec),
}

impl ScorerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ScorerSpec::Od(s) => s.name(),
            ScorerSpec::RecolOd(_) => fusion::SCORER_NAME,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScorerSpec::Od(s) => s.validate(),
            ScorerSpec::RecolOd(_) => Ok(()),
        }
    }
}

impl Serialize for ScorerSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Fusion<'a> {
            kind: &'static str,
            #[serde(flatten)]
            spec: &'a FusionSpec,
        }
        match self {
            ScorerSpec::Od(spec) => spec.serialize(s),
            ScorerSpec::RecolOd(spec) => Fusion {
                kind: fusion::SCORER_NAME,
                spec,
            }
            .serialize(s),
        }
    }
}

const SCORER_KINDS: &str = "knn_mean, kth_nn, lof, hbos, iforest, ucblof, ldcof, recol-od";

impl<'de> Deserialize<'de> for ScorerSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut value = serde_json::Value::deserialize(d)?;
        let kind = value
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| D::Error::custom("missing string field `kind`"))?
            .to_owned();
        if kind == fusion::SCORER_NAME {
            if let Some(obj) = value.as_object_mut() {
                obj.remove("kind");
            }
            return FusionSpec::deserialize(value)
                .map(ScorerSpec::RecolOd)
                .map_err(D::Error::custom);
        }
        OdSpec::deserialize(value).map(ScorerSpec::Od).map_err(|e| {
            if e.to_string().contains("unknown variant") {
                D::Error::custom(format!("unknown scorer `{kind}`, expected one of {SCORER_KINDS}"))
            } else {
                D::Error::custom(e)
            }
        })
    }
}

/// One cell of an experiment: dataset, split, scorer and RECol recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Name used in reports; callers fill it from the data file when empty.
    #[serde(default)]
    pub dataset: String,
    #[serde(default)]
    pub split: SplitSpec,
    pub scorer: ScorerSpec,
    #[serde(default)]
    pub recol: RecolConfig,
    /// Metric of record (used for model selection and reports).
    #[serde(default)]
    pub metric: Metric,
}

impl ExperimentConfig {
    /// Parses a JSON config, reporting the field path of the first problem.
    pub fn from_json_str(s: &str) -> Result<ExperimentConfig> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let at = |path: &str| {
            let path = path.to_owned();
            move |e: Error| Error::Config {
                path,
                message: e.to_string(),
            }
        };
        let f = self.split.train_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Config {
                path: "split.train_fraction".into(),
                message: format!("must lie in (0, 1), got {f}"),
            });
        }
        self.scorer.validate().map_err(at("scorer"))?;
        self.recol.regressor.validate().map_err(at("recol.regressor"))?;
        self.recol.validate().map_err(at("recol.r2_drop"))?;
        Ok(())
    }

    /// The config with fields that cannot influence the outcome normalised,
    /// so that equivalent configs share a hash.
    pub fn canonical(&self) -> ExperimentConfig {
        let mut c = self.clone();
        c.recol = match &self.scorer {
            ScorerSpec::RecolOd(_) => RecolConfig {
                feature_mode: FeatureMode::RecolOnly,
                scale_original: true,
                ..self.recol.clone()
            },
            ScorerSpec::Od(_) => self.recol.canonical(),
        };
        c
    }

    /// Stable digest of the canonical config JSON (object keys sorted).
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self.canonical()).expect("config serialises");
        let digest = Sha256::digest(value.to_string().as_bytes());
        digest[..16].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Feature mode as actually used (RECol-OD always consumes RECols only).
    pub fn effective_mode(&self) -> FeatureMode {
        match self.scorer {
            ScorerSpec::RecolOd(_) => FeatureMode::RecolOnly,
            ScorerSpec::Od(_) => self.recol.feature_mode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultKind {
    /// Classical detector on the original features only.
    Baseline,
    Combined,
    RecolOnly,
    RecolOd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub split_seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub n_recols: usize,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config_hash: String,
    pub dataset: String,
    pub scorer: String,
    pub kind: ResultKind,
    pub train_roc_auc: f64,
    pub test_roc_auc: f64,
    pub train_pr_auc: f64,
    pub test_pr_auc: f64,
    pub wall_time_secs: f64,
    pub provenance: Provenance,
    pub config: ExperimentConfig,
}

impl ExperimentResult {
    pub fn train_metric(&self, m: Metric) -> f64 {
        match m {
            Metric::RocAuc => self.train_roc_auc,
            Metric::PrAuc => self.train_pr_auc,
        }
    }

    pub fn test_metric(&self, m: Metric) -> f64 {
        match m {
            Metric::RocAuc => self.test_roc_auc,
            Metric::PrAuc => self.test_pr_auc,
        }
    }

    /// The four metric values, for equality checks that must ignore timing.
    pub fn metrics(&self) -> [f64; 4] {
        [self.train_roc_auc, self.test_roc_auc, self.train_pr_auc, self.test_pr_auc]
    }
}

/// A split whose label-free feature tables are what every fitting step
/// sees; labels are only read back in [`Prepared::finish`].
pub struct Prepared {
    split: SplitResult,
    pub train: Table,
    pub test: Table,
}

impl Prepared {
    pub fn new(table: &Table, split: &SplitSpec) -> Result<Prepared> {
        if table.labels().is_none() {
            return Err(Error::param("experiments need a labeled table"));
        }
        let split = split.apply(table)?;
        Ok(Prepared {
            train: split.train.without_labels(),
            test: split.test.without_labels(),
            split,
        })
    }

    /// Fits the feature space an OD config needs; shared by every config
    /// with the same recipe.
    pub fn fit_space(&self, recol: &RecolConfig) -> Result<FeatureSpace> {
        FeatureSpace::fit(&self.train, recol)
    }

    pub fn fit_recols(&self, recol: &RecolConfig) -> Result<RecolModelSet> {
        fit_recols(&self.train, recol)
    }

    /// Runs the scoring half of an experiment against a fitted model set
    /// (`None` for baseline configs, which never touch RECols).
    pub fn run(&self, cfg: &ExperimentConfig, recols: Option<&RecolModelSet>) -> Result<ExperimentResult> {
        let start = Instant::now();
        let (train_scores, test_scores, n_recols) = match &cfg.scorer {
            ScorerSpec::RecolOd(spec) => {
                let ms = recols.ok_or_else(|| Error::param("RECol-OD needs fitted RECols"))?;
                let train = ms.recol_errors_as(&self.train, FeatureMode::RecolOnly)?;
                let test = ms.recol_errors_as(&self.test, FeatureMode::RecolOnly)?;
                (
                    recol_od(&train, &train, spec)?.scores,
                    recol_od(&train, &test, spec)?.scores,
                    train.cols(),
                )
            }
            ScorerSpec::Od(spec) => {
                let mode = cfg.recol.feature_mode;
                let (train, test) = match (mode, recols) {
                    (FeatureMode::OriginalOnly, _) | (_, None) => {
                        let space = self.fit_space(&cfg.recol)?;
                        (space.transform(&self.train)?, space.transform(&self.test)?)
                    }
                    (_, Some(ms)) => (ms.transform_as(&self.train, mode)?, ms.transform_as(&self.test, mode)?),
                };
                let detector = Detector::fit(spec, &train.matrix)?;
                (
                    detector.score_train(&train.matrix)?,
                    detector.score(&test.matrix)?,
                    train.n_recols(),
                )
            }
        };
        self.finish(cfg, &train_scores, &test_scores, n_recols, start.elapsed().as_secs_f64())
    }

    fn finish(
        &self,
        cfg: &ExperimentConfig,
        train_scores: &[f64],
        test_scores: &[f64],
        n_recols: usize,
        wall_time_secs: f64,
    ) -> Result<ExperimentResult> {
        let train_labels = self.split.train.labels().expect("checked in new");
        let test_labels = self.split.test.labels().expect("checked in new");
        let kind = match (&cfg.scorer, cfg.recol.feature_mode) {
            (ScorerSpec::RecolOd(_), _) => ResultKind::RecolOd,
            (_, FeatureMode::OriginalOnly) => ResultKind::Baseline,
            (_, FeatureMode::Combined) => ResultKind::Combined,
            (_, FeatureMode::RecolOnly) => ResultKind::RecolOnly,
        };
        Ok(ExperimentResult {
            config_hash: cfg.hash(),
            dataset: cfg.dataset.clone(),
            scorer: cfg.scorer.name().to_owned(),
            kind,
            train_roc_auc: roc_auc(train_scores, train_labels)?,
            test_roc_auc: roc_auc(test_scores, test_labels)?,
            train_pr_auc: pr_auc(train_scores, train_labels)?,
            test_pr_auc: pr_auc(test_scores, test_labels)?,
            wall_time_secs,
            provenance: Provenance {
                split_seed: self.split.seed,
                n_train: self.split.train_rows.len(),
                n_test: self.split.test_rows.len(),
                n_recols,
                version: env!("CARGO_PKG_VERSION").to_owned(),
            },
            config: cfg.clone(),
        })
    }
}

/// Whether a config needs fitted RECols at all.
pub fn needs_recols(cfg: &ExperimentConfig) -> bool {
    matches!(cfg.scorer, ScorerSpec::RecolOd(_)) || cfg.recol.feature_mode != FeatureMode::OriginalOnly
}

/// Split, fit the feature space on train rows only, score, and compute
/// train and test metrics.
pub fn run_experiment(table: &Table, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let prepared = Prepared::new(table, &cfg.split)?;
    let recols = if needs_recols(cfg) {
        Some(prepared.fit_recols(&recol_fit_config(cfg))?)
    } else {
        None
    };
    let mut result = prepared.run(cfg, recols.as_ref())?;
    result.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(result)
}

/// The part of a config that determines the fitted RECol models. Configs
/// that agree here can share one fit.
pub fn recol_fit_config(cfg: &ExperimentConfig) -> RecolConfig {
    RecolConfig {
        feature_mode: FeatureMode::Combined,
        scale_original: true,
        ..cfg.recol.clone()
    }
}

/// Picks the result with the best TRAIN metric. Test values are never
/// consulted; ties go to the lexicographically smallest config hash.
pub fn select_best(results: &[ExperimentResult], metric: Metric) -> Result<&ExperimentResult> {
    results
        .iter()
        .reduce(|best, r| {
            let (a, b) = (r.train_metric(metric), best.train_metric(metric));
            if a > b || (a == b && r.config_hash < best.config_hash) {
                r
            } else {
                best
            }
        })
        .ok_or_else(|| Error::param("cannot select from an empty result set"))
}
