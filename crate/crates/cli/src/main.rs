//! `recol`: batch front end for the RECol outlier-detection toolkit.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 when a
//! run fails.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use recol_core::data::{SyntheticLinear, Table};
use recol_core::eval::{
    build_report, read_results, run_experiment, run_grid, ExperimentConfig, GridSpec, Metric, ReportStyle,
};
use recol_core::par;

#[derive(Parser)]
#[command(name = "recol", version, about = "Reconstruction-error columns for outlier detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a labeled synthetic linear-band dataset as CSV (columns x, y, label).
    Synth {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        slope: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        intercept: f64,
        /// Inlier noise sigma around the line.
        #[arg(long, default_value_t = SyntheticLinear::default().noise_sigma)]
        noise: f64,
        #[arg(long, default_value_t = 0.05)]
        outlier_fraction: f64,
        /// Minimum outlier residual in units of the noise sigma (> 2).
        #[arg(long, default_value_t = 3.0)]
        outlier_offset: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one experiment and append its result as a JSON line.
    Run {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label_column: String,
        /// ExperimentConfig JSON file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the cross product of a grid file. Configs already in `--out` are skipped.
    Grid {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label_column: String,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (defaults to all cores).
        #[arg(long, env = "RECOL_PARALLELISM")]
        parallelism: Option<usize>,
    },
    /// Render a comparison table from a results file.
    Report {
        #[arg(long)]
        results: PathBuf,
        /// roc_auc or pr_auc
        #[arg(long, default_value = "roc_auc")]
        metric: Metric,
        /// best-vs-best, recol-od-vs-avg or combined-vs-recol-only
        #[arg(long, default_value = "best-vs-best")]
        style: ReportStyle,
        /// Also write the table as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e
                .chain()
                .filter_map(|c| c.downcast_ref::<recol_core::Error>())
                .any(recol_core::Error::is_usage_error);
            ExitCode::from(if usage { 1 } else { 2 })
        }
    }
}

fn execute(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Synth {
            n,
            slope,
            intercept,
            noise,
            outlier_fraction,
            outlier_offset,
            seed,
            out,
        } => {
            let table = SyntheticLinear {
                n,
                slope,
                intercept,
                noise_sigma: noise,
                outlier_fraction,
                outlier_offset_sigmas: outlier_offset,
                seed,
                ..SyntheticLinear::default()
            }
            .generate()?;
            table.save_csv(&out, "label")?;
            println!("wrote {} rows to {}", table.n_rows(), out.display());
        }
        Command::Run {
            data,
            label_column,
            config,
            out,
        } => {
            let table = load(&data, &label_column)?;
            let text = read(&config)?;
            let mut cfg = ExperimentConfig::from_json_str(&text)
                .with_context(|| format!("invalid config {}", config.display()))?;
            if cfg.dataset.is_empty() {
                cfg.dataset = dataset_name(&data);
            }
            let result = run_experiment(&table, &cfg)?;
            let mut file = append(&out)?;
            writeln!(file, "{}", serde_json::to_string(&result)?)
                .with_context(|| format!("writing {}", out.display()))?;
            println!(
                "{} {} [{}]: train roc {:.4} pr {:.4} | test roc {:.4} pr {:.4}",
                result.dataset,
                result.scorer,
                result.config_hash,
                result.train_roc_auc,
                result.train_pr_auc,
                result.test_roc_auc,
                result.test_pr_auc
            );
        }
        Command::Grid {
            data,
            label_column,
            grid,
            out,
            parallelism,
        } => {
            let table = load(&data, &label_column)?;
            let mut spec = GridSpec::from_json_str(&read(&grid)?)
                .with_context(|| format!("invalid grid {}", grid.display()))?;
            if spec.dataset.is_empty() {
                spec.dataset = dataset_name(&data);
            }
            let configs = spec.expand()?;
            println!(
                "grid {}: {} configurations ({} RECol recipes)",
                grid.display(),
                configs.len(),
                spec.recol_recipe_count()
            );
            let done: HashSet<String> = if out.exists() {
                read_results(&out)?.into_iter().map(|r| r.config_hash).collect()
            } else {
                HashSet::new()
            };
            let threads = parallelism.unwrap_or_else(par::available_threads);
            if threads == 0 {
                bail!(recol_core::Error::InvalidParameter("parallelism must be at least 1".into()));
            }
            let sink: Mutex<File> = Mutex::new(append(&out)?);
            let outcome = run_grid(&table, &configs, threads, &done, Some(&sink))?;
            for (hash, message) in &outcome.failures {
                eprintln!("config {hash} failed: {message}");
            }
            println!(
                "{} run, {} skipped (already in {}), {} failed",
                outcome.results.len(),
                outcome.skipped,
                out.display(),
                outcome.failures.len()
            );
        }
        Command::Report {
            results,
            metric,
            style,
            csv,
        } => {
            let rows = read_results(&results)?;
            if rows.is_empty() {
                bail!("{} holds no results", results.display());
            }
            let report = build_report(&rows, metric, style)?;
            print!("{}", report.to_text());
            if let Some(path) = csv {
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                report.write_csv(file)?;
            }
        }
    }
    Ok(())
}

fn load(path: &Path, label_column: &str) -> anyhow::Result<Table> {
    Ok(Table::load_csv(path, Some(label_column))?)
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn append(path: &Path) -> anyhow::Result<File> {
    OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned())
}
