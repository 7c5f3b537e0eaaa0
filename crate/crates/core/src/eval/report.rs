use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::experiment::{select_best, ExperimentResult, ResultKind};
use crate::eval::metrics::Metric;

/// A metric value in hundredths of a percentage point. Table arithmetic is
/// done on these integers so a printed Δ is exactly the difference of the
/// printed operands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pct(pub i64);

impl Pct {
    /// From a metric in [0, 1].
    pub fn from_fraction(v: f64) -> Pct {
        Pct((v * 10_000.0).round() as i64)
    }

    /// From a value already in percentage points, e.g. `89.58`.
    pub fn from_points(v: f64) -> Pct {
        Pct((v * 100.0).round() as i64)
    }

    pub fn points(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl std::ops::Sub for Pct {
    type Output = Pct;
    fn sub(self, rhs: Pct) -> Pct {
        Pct(self.0 - rhs.0)
    }
}

impl fmt::Display for Pct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let a = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", a / 100, a % 100)
    }
}

impl FromStr for Pct {
    type Err = Error;
    fn from_str(s: &str) -> Result<Pct> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::param(format!("not a percentage: `{s}`")))?;
        Ok(Pct::from_points(v))
    }
}

/// Baseline vs RECols (first table layout, also used for combined vs
/// RECols-only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaRow {
    pub dataset: String,
    pub baseline: Pct,
    pub recol: Pct,
    pub delta: Pct,
}

impl DeltaRow {
    pub fn new(dataset: impl Into<String>, baseline: Pct, recol: Pct) -> DeltaRow {
        DeltaRow {
            dataset: dataset.into(),
            baseline,
            recol,
            delta: recol - baseline,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecolOdRow {
    pub dataset: String,
    pub best_baseline: Pct,
    pub avg_baseline: Pct,
    pub recol_od: Pct,
    pub delta_best: Pct,
    pub delta_avg: Pct,
}

impl RecolOdRow {
    pub fn new(dataset: impl Into<String>, best_baseline: Pct, avg_baseline: Pct, recol_od: Pct) -> RecolOdRow {
        RecolOdRow {
            dataset: dataset.into(),
            best_baseline,
            avg_baseline,
            recol_od,
            delta_best: recol_od - best_baseline,
            delta_avg: recol_od - avg_baseline,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportStyle {
    #[default]
    BestVsBest,
    RecolOdVsAvg,
    CombinedVsRecolOnly,
}

impl FromStr for ReportStyle {
    type Err = Error;
    fn from_str(s: &str) -> Result<ReportStyle> {
        match s {
            "best-vs-best" => Ok(ReportStyle::BestVsBest),
            "recol-od-vs-avg" => Ok(ReportStyle::RecolOdVsAvg),
            "combined-vs-recol-only" => Ok(ReportStyle::CombinedVsRecolOnly),
            _ => Err(Error::param(format!(
                "unknown report style `{s}` (expected best-vs-best, recol-od-vs-avg or combined-vs-recol-only)"
            ))),
        }
    }
}

/// A rendered table: header plus string cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    /// Right-aligned numeric columns, left-aligned first column.
    pub fn to_text(&self) -> String {
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].chars().count())
                    .chain([self.headers[c].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, &w))| {
                    let pad = " ".repeat(w - cell.chars().count());
                    if i == 0 {
                        format!("{cell}{pad}")
                    } else {
                        format!("{pad}{cell}")
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_owned()
        };
        let mut out = format!("{}\n{}\n", self.title, line(&self.headers));
        let total: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(&self.headers)?;
        for row in &self.rows {
            wtr.write_record(row)?;
        }
        wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

pub fn delta_table(title: &str, labels: [&str; 2], rows: &[DeltaRow]) -> Report {
    Report {
        title: title.to_owned(),
        headers: vec!["Dataset".into(), labels[0].into(), labels[1].into(), "Δ".into()],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.dataset.clone(),
                    r.baseline.to_string(),
                    r.recol.to_string(),
                    r.delta.to_string(),
                ]
            })
            .collect(),
    }
}

pub fn recol_od_table(title: &str, rows: &[RecolOdRow]) -> Report {
    Report {
        title: title.to_owned(),
        headers: ["Dataset", "Best Baseline", "Avg. Baseline", "RECol-OD", "Δ to Best", "Δ to Avg."]
            .map(String::from)
            .to_vec(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.dataset.clone(),
                    r.best_baseline.to_string(),
                    r.avg_baseline.to_string(),
                    r.recol_od.to_string(),
                    r.delta_best.to_string(),
                    r.delta_avg.to_string(),
                ]
            })
            .collect(),
    }
}

fn by_dataset(results: &[ExperimentResult], kind: ResultKind) -> BTreeMap<&str, Vec<ExperimentResult>> {
    let mut map: BTreeMap<&str, Vec<ExperimentResult>> = BTreeMap::new();
    for r in results.iter().filter(|r| r.kind == kind) {
        map.entry(r.dataset.as_str()).or_default().push(r.clone());
    }
    map
}

fn aligned<'a, T, U>(
    left: &'a BTreeMap<&'a str, T>,
    right: &'a BTreeMap<&'a str, U>,
    what: [&str; 2],
) -> Result<Vec<(&'a str, &'a T, &'a U)>> {
    if left.is_empty() {
        return Err(Error::param(format!("no {} results", what[0])));
    }
    let lk: Vec<&&str> = left.keys().collect();
    let rk: Vec<&&str> = right.keys().collect();
    if lk != rk {
        return Err(Error::param(format!(
            "dataset sets differ: {} results cover {lk:?}, {} results cover {rk:?}",
            what[0], what[1]
        )));
    }
    Ok(left.iter().map(|(d, l)| (*d, l, &right[d])).collect())
}

/// Per dataset: best baseline vs best result of `kind`, each picked on the
/// train metric and reported on test.
pub fn delta_report(results: &[ExperimentResult], left: ResultKind, right: ResultKind, metric: Metric) -> Result<Vec<DeltaRow>> {
    let l = by_dataset(results, left);
    let r = by_dataset(results, right);
    aligned(&l, &r, [kind_label(left), kind_label(right)])?
        .into_iter()
        .map(|(d, a, b)| {
            Ok(DeltaRow::new(
                d,
                Pct::from_fraction(select_best(a, metric)?.test_metric(metric)),
                Pct::from_fraction(select_best(b, metric)?.test_metric(metric)),
            ))
        })
        .collect()
}

/// Per dataset: the average baseline is the mean test metric over every
/// detector family, each represented by its train-selected config.
pub fn recol_od_report(results: &[ExperimentResult], metric: Metric) -> Result<Vec<RecolOdRow>> {
    let base = by_dataset(results, ResultKind::Baseline);
    let od = by_dataset(results, ResultKind::RecolOd);
    aligned(&base, &od, ["baseline", "recol-od"])?
        .into_iter()
        .map(|(d, b, o)| {
            let mut families: BTreeMap<&str, Vec<ExperimentResult>> = BTreeMap::new();
            for r in b {
                families.entry(r.scorer.as_str()).or_default().push(r.clone());
            }
            let picks = families
                .values()
                .map(|f| select_best(f, metric).map(|r| r.test_metric(metric)))
                .collect::<Result<Vec<f64>>>()?;
            let avg = picks.iter().sum::<f64>() / picks.len() as f64;
            Ok(RecolOdRow::new(
                d,
                Pct::from_fraction(select_best(b, metric)?.test_metric(metric)),
                Pct::from_fraction(avg),
                Pct::from_fraction(select_best(o, metric)?.test_metric(metric)),
            ))
        })
        .collect()
}

fn kind_label(k: ResultKind) -> &'static str {
    match k {
        ResultKind::Baseline => "baseline",
        ResultKind::Combined => "combined",
        ResultKind::RecolOnly => "recol_only",
        ResultKind::RecolOd => "recol-od",
    }
}

pub fn build_report(results: &[ExperimentResult], metric: Metric, style: ReportStyle) -> Result<Report> {
    if results.is_empty() {
        return Err(Error::param("no results to report"));
    }
    let m = match metric {
        Metric::RocAuc => "ROC-AUC",
        Metric::PrAuc => "PR-AUC",
    };
    Ok(match style {
        ReportStyle::BestVsBest => delta_table(
            &format!("RECols versus baseline ({m}, test)"),
            ["Baseline", "RECols"],
            &delta_report(results, ResultKind::Baseline, ResultKind::Combined, metric)?,
        ),
        ReportStyle::CombinedVsRecolOnly => delta_table(
            &format!("Combined versus RECols only ({m}, test)"),
            ["RECols + Standard", "RECols Only"],
            &delta_report(results, ResultKind::Combined, ResultKind::RecolOnly, metric)?,
        ),
        ReportStyle::RecolOdVsAvg => recol_od_table(
            &format!("RECol-OD versus baselines ({m}, test)"),
            &recol_od_report(results, metric)?,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pct_display() {
        assert_eq!(Pct(-354).to_string(), "-3.54");
        assert_eq!(Pct(90).to_string(), "0.90");
        assert_eq!(Pct(-5).to_string(), "-0.05");
        assert_eq!(Pct(10000).to_string(), "100.00");
        assert_eq!("72.09".parse::<Pct>().unwrap(), Pct(7209));
        assert_eq!(Pct::from_fraction(0.958_25), Pct(9583));
    }

    #[test]
    fn text_is_aligned() {
        let r = delta_table("t", ["Baseline", "RECols"], &[DeltaRow::new("a", Pct(1), Pct(12345))]);
        let text = r.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1].chars().count(), lines[3].chars().count());
    }
}
