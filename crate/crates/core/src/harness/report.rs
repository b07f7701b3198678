use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, HarnessError, MetricSpace, RunRecord};
use crate::forecasters::ModelFamily;
use crate::rolling_cv::Scheme;

/// Arithmetic means of a cell's runs. MASE averages the runs where it is
/// defined; `mase_undefined` counts the others.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellMeans {
    pub smape: f64,
    pub maape: f64,
    pub mase: Option<f64>,
    pub mase_undefined: usize,
}

/// One (dataset, model, window length) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub dataset: String,
    pub model: String,
    pub family: ModelFamily,
    pub scheme: Scheme,
    pub window: usize,
    pub train_rows: usize,
    pub runs: Vec<RunRecord>,
    /// First failure; a failed cell has no means.
    pub error: Option<String>,
    pub mean: Option<CellMeans>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl CellReport {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    /// Recomputes `mean` from the per-run records.
    pub fn summarize(&mut self) {
        self.mean = if self.failed() || self.runs.is_empty() {
            None
        } else {
            Some(CellMeans {
                smape: mean(self.runs.iter().map(|r| r.smape)).expect("non-empty"),
                maape: mean(self.runs.iter().map(|r| r.maape)).expect("non-empty"),
                mase: mean(self.runs.iter().filter_map(|r| r.mase)),
                mase_undefined: self.runs.iter().filter(|r| r.mase.is_none()).count(),
            })
        };
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub seed: u64,
    pub metric_space: MetricSpace,
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
}

/// Paths written by [`BenchmarkReport::write`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub table: PathBuf,
}

const METRICS: [&str; 3] = ["smape", "maape", "mase"];

impl BenchmarkReport {
    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.failed()).count()
    }

    /// Parses a JSON detail file and recomputes every cell mean from its runs.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut report: Self = serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Config {
            key: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        for cell in &mut report.cells {
            cell.summarize();
        }
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report is plain data");
        out.push('\n');
        out
    }

    /// One row per cell and metric.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset,model,family,scheme,window,metric,mean,runs,status\n");
        for cell in &self.cells {
            let status = if cell.failed() { "failed" } else { "ok" };
            for metric in METRICS {
                let value = match (&cell.mean, metric) {
                    (None, _) => None,
                    (Some(m), "smape") => Some(m.smape),
                    (Some(m), "maape") => Some(m.maape),
                    (Some(m), _) => m.mase,
                };
                let value = value.map_or_else(|| "NA".to_string(), |v| v.to_string());
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{metric},{value},{},{status}",
                    csv_field(&cell.dataset),
                    csv_field(&cell.model),
                    cell.family,
                    cell.scheme,
                    cell.window,
                    cell.runs.len(),
                );
            }
        }
        out
    }

    /// Aligned text table: one block of three metric rows per model, one
    /// column per dataset and window length.
    pub fn to_table(&self) -> String {
        let mut columns: Vec<(&str, usize)> = Vec::new();
        let mut models: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !columns.contains(&(c.dataset.as_str(), c.window)) {
                columns.push((c.dataset.as_str(), c.window));
            }
            if !models.contains(&c.model.as_str()) {
                models.push(&c.model);
            }
        }
        let mut rows: Vec<Vec<String>> = vec![
            std::iter::once("model".to_string())
                .chain(std::iter::once("metric".to_string()))
                .chain(columns.iter().map(|(d, w)| format!("{d}/{w}")))
                .collect(),
        ];
        for model in &models {
            for (i, label) in ["sMAPE", "MAAPE", "MASE"].into_iter().enumerate() {
                let mut row = vec![if i == 0 { model.to_string() } else { String::new() }, label.to_string()];
                for (d, w) in &columns {
                    let cell = self.cells.iter().find(|c| c.model == *model && c.dataset == *d && c.window == *w);
                    row.push(match cell {
                        None => String::new(),
                        Some(c) if c.failed() => "FAIL".into(),
                        Some(c) => {
                            let m = c.mean.as_ref();
                            let v = match i {
                                0 => m.map(|m| m.smape),
                                1 => m.map(|m| m.maape),
                                _ => m.and_then(|m| m.mase),
                            };
                            v.map_or_else(|| "NA".into(), |v| format!("{v:.4}"))
                        }
                    });
                }
                rows.push(row);
            }
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = format!(
            "Forecasting results: mean over Monte-Carlo runs, metrics in {} space, seed {}\n\n",
            match self.metric_space {
                MetricSpace::Scaled => "min-max scaled",
            },
            self.seed
        );
        for (k, row) in rows.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(j, (v, w))| if j < 2 { format!("{v:<w$}") } else { format!("{v:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
            if k == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                let _ = writeln!(out, "{}", rule.join("  "));
            }
        }
        let notes: Vec<String> = self
            .cells
            .iter()
            .filter_map(|c| {
                let key = format!("{} / {} / {}", c.dataset, c.model, c.window);
                match (&c.error, &c.mean) {
                    (Some(e), _) => Some(format!("failed {key}: {e}")),
                    (None, Some(m)) if m.mase_undefined > 0 => {
                        Some(format!("{key}: MASE undefined in {} of {} runs", m.mase_undefined, c.runs.len()))
                    }
                    _ => None,
                }
            })
            .collect();
        if !notes.is_empty() {
            out.push('\n');
            for n in notes {
                let _ = writeln!(out, "{n}");
            }
        }
        out
    }

    /// Writes `report.csv`, `report.json` and `report.txt` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<ReportFiles, HarnessError> {
        let dir = dir.as_ref();
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| HarnessError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let files = ReportFiles {
            csv: dir.join("report.csv"),
            json: dir.join("report.json"),
            table: dir.join("report.txt"),
        };
        std::fs::write(&files.csv, self.to_csv()).map_err(io(&files.csv))?;
        std::fs::write(&files.json, self.to_json()).map_err(io(&files.json))?;
        std::fs::write(&files.table, self.to_table()).map_err(io(&files.table))?;
        Ok(files)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rolling_cv::HyperPoint;

    fn record(run: usize, smape: f64, mase: Option<f64>) -> RunRecord {
        RunRecord {
            run,
            start: run,
            best: HyperPoint::default(),
            cv_smape: 0.0,
            smape,
            maape: smape / 2.0,
            mase,
        }
    }

    #[test]
    fn means_skip_undefined_mase() {
        let mut cell = CellReport {
            dataset: "d".into(),
            model: "naive".into(),
            family: ModelFamily::Naive,
            scheme: Scheme::MatrixPairs,
            window: 40,
            train_rows: 32,
            runs: vec![record(1, 0.1, Some(1.0)), record(2, 0.2, None), record(3, 0.6, Some(2.0))],
            error: None,
            mean: None,
        };
        cell.summarize();
        let m = cell.mean.unwrap();
        assert!((m.smape - 0.3).abs() < 1e-15);
        assert_eq!(m.mase, Some(1.5));
        assert_eq!(m.mase_undefined, 1);
        cell.error = Some("boom".into());
        cell.summarize();
        assert_eq!(cell.mean, None);
    }

    #[test]
    fn csv_quotes_awkward_names() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
