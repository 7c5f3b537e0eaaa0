use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{ScalerKind, SplitSpec, Table};
use crate::error::{Error, Result};
use crate::eval::experiment::{needs_recols, recol_fit_config, ExperimentConfig, ExperimentResult, Prepared, ScorerSpec};
use crate::eval::metrics::Metric;
use crate::par;
use crate::recol::{ErrorMetric, FeatureMode, R2Filter, RecolConfig};
use crate::regress::RegressorSpec;

fn one<T: Default>() -> Vec<T> {
    vec![T::default()]
}

/// Axis values whose cross product defines a grid. A missing axis takes
/// the single default value; an explicitly empty axis is an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub dataset: String,
    #[serde(default)]
    pub split: SplitSpec,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default = "one")]
    pub regressors: Vec<RegressorSpec>,
    #[serde(default = "one")]
    pub error_metrics: Vec<ErrorMetric>,
    #[serde(default = "one")]
    pub input_scalings: Vec<ScalerKind>,
    #[serde(default = "one")]
    pub clipping: Vec<bool>,
    #[serde(default = "one")]
    pub r2_drops: Vec<R2Filter>,
    #[serde(default = "one")]
    pub feature_modes: Vec<FeatureMode>,
    pub scorers: Vec<ScorerSpec>,
}

impl GridSpec {
    pub fn from_json_str(s: &str) -> Result<GridSpec> {
        let de = &mut serde_json::Deserializer::from_str(s);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    /// Number of distinct ways of building RECols in this grid.
    pub fn recol_recipe_count(&self) -> usize {
        self.regressors.len()
            * self.error_metrics.len()
            * self.input_scalings.len()
            * self.clipping.len()
            * self.r2_drops.len()
    }

    /// Full cross product, validated, with configs that hash identically
    /// collapsed to their first occurrence.
    pub fn expand(&self) -> Result<Vec<ExperimentConfig>> {
        let axes = [
            ("regressors", self.regressors.len()),
            ("error_metrics", self.error_metrics.len()),
            ("input_scalings", self.input_scalings.len()),
            ("clipping", self.clipping.len()),
            ("r2_drops", self.r2_drops.len()),
            ("feature_modes", self.feature_modes.len()),
            ("scorers", self.scorers.len()),
        ];
        if let Some((name, _)) = axes.iter().find(|(_, n)| *n == 0) {
            return Err(Error::Config {
                path: (*name).into(),
                message: "empty grid: axis has no values".into(),
            });
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for regressor in &self.regressors {
            for &error_metric in &self.error_metrics {
                for &input_scaling in &self.input_scalings {
                    for &clip_at_2sigma in &self.clipping {
                        for &r2_drop in &self.r2_drops {
                            for &feature_mode in &self.feature_modes {
                                for scorer in &self.scorers {
                                    let cfg = ExperimentConfig {
                                        dataset: self.dataset.clone(),
                                        split: self.split.clone(),
                                        scorer: scorer.clone(),
                                        recol: RecolConfig {
                                            regressor: regressor.clone(),
                                            error_metric,
                                            input_scaling,
                                            clip_at_2sigma,
                                            r2_drop,
                                            feature_mode,
                                            ..RecolConfig::default()
                                        },
                                        metric: self.metric,
                                    };
                                    if seen.insert(cfg.hash()) {
                                        out.push(cfg);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        for (i, cfg) in out.iter().enumerate() {
            cfg.validate().map_err(|e| match e {
                Error::Config { path, message } => Error::Config {
                    path: format!("<config {i}>.{path}"),
                    message,
                },
                other => other,
            })?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridOutcome {
    /// Completed runs, in expansion order.
    pub results: Vec<ExperimentResult>,
    /// Configs skipped because their hash was already done.
    pub skipped: usize,
    /// Configs that failed at run time: (config hash, message).
    pub failures: Vec<(String, String)>,
}

struct Task {
    split: usize,
    members: Vec<usize>,
}

/// Runs `configs` against one table with up to `parallelism` worker
/// threads. Configs whose hash is in `done` are skipped. Configs sharing a
/// split and a RECol recipe share one RECol fit. Each finished group is
/// appended to `sink` as JSON lines under a lock, so an interrupted grid
/// keeps everything written so far.
pub fn run_grid(
    table: &Table,
    configs: &[ExperimentConfig],
    parallelism: usize,
    done: &HashSet<String>,
    sink: Option<&Mutex<dyn Write + Send>>,
) -> Result<GridOutcome> {
    if configs.is_empty() {
        return Err(Error::param("empty grid"));
    }
    let mut outcome = GridOutcome::default();
    let mut splits: Vec<SplitSpec> = Vec::new();
    let mut groups: BTreeMap<(usize, String), Vec<usize>> = BTreeMap::new();
    for (i, cfg) in configs.iter().enumerate() {
        if done.contains(&cfg.hash()) {
            outcome.skipped += 1;
            continue;
        }
        let split = match splits.iter().position(|s| s == &cfg.split) {
            Some(p) => p,
            None => {
                splits.push(cfg.split.clone());
                splits.len() - 1
            }
        };
        let key = if needs_recols(cfg) {
            serde_json::to_string(&recol_fit_config(cfg))?
        } else {
            String::new()
        };
        groups.entry((split, key)).or_default().push(i);
    }
    let prepared = splits
        .iter()
        .map(|s| Prepared::new(table, s))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<Task> = groups
        .into_iter()
        .map(|((split, _), members)| Task { split, members })
        .collect();

    let sink_error: Mutex<Option<Error>> = Mutex::new(None);
    let per_task = par::with_threads(parallelism, || {
        par::map_slice(&tasks, |task| {
            let out = run_task(&prepared[task.split], configs, &task.members);
            if let Some(sink) = sink {
                let mut lines = String::new();
                for r in out.iter().filter_map(|(_, r)| r.as_ref().ok()) {
                    lines.push_str(&serde_json::to_string(r).expect("result serialises"));
                    lines.push('\n');
                }
                let mut w = sink.lock().expect("sink lock");
                if let Err(e) = w.write_all(lines.as_bytes()).and_then(|_| w.flush()) {
                    sink_error
                        .lock()
                        .expect("error lock")
                        .get_or_insert(Error::io("<results>", e));
                }
            }
            out
        })
    });
    if let Some(e) = sink_error.into_inner().expect("error lock") {
        return Err(e);
    }

    let mut indexed: Vec<(usize, Result<ExperimentResult>)> = per_task.into_iter().flatten().collect();
    indexed.sort_by_key(|(i, _)| *i);
    for (i, r) in indexed {
        match r {
            Ok(r) => outcome.results.push(r),
            Err(e) => outcome.failures.push((configs[i].hash(), e.to_string())),
        }
    }
    Ok(outcome)
}

fn run_task(prepared: &Prepared, configs: &[ExperimentConfig], members: &[usize]) -> Vec<(usize, Result<ExperimentResult>)> {
    let first = &configs[members[0]];
    let start = Instant::now();
    let recols = if needs_recols(first) {
        match prepared.fit_recols(&recol_fit_config(first)) {
            Ok(ms) => Some(ms),
            Err(e) => {
                let msg = e.to_string();
                return members
                    .iter()
                    .map(|&i| (i, Err(Error::param(format!("RECol fit failed: {msg}")))))
                    .collect();
            }
        }
    } else {
        None
    };
    let fit_secs = start.elapsed().as_secs_f64();
    members
        .iter()
        .map(|&i| {
            let r = prepared.run(&configs[i], recols.as_ref()).map(|mut r| {
                r.wall_time_secs += fit_secs;
                r
            });
            (i, r)
        })
        .collect()
}

/// Reads a JSON-lines results file. Blank lines are ignored.
pub fn read_results(path: &Path) -> Result<Vec<ExperimentResult>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Config {
            path: format!("{}:{}", path.display(), n + 1),
            message: e.to_string(),
        })?);
    }
    Ok(out)
}
