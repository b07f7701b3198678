use std::path::Path;

use serde::{Deserialize, Serialize};

use super::report::{BenchmarkReport, CellReport};
use super::{sample_windows, ExperimentConfig, HarnessError};
use crate::dataset::{RowsView, ScalingTransform, SeriesMatrix};
use crate::exec::Execution;
use crate::forecasters::{ModelFactory, ModelSpec};
use crate::metrics::{evaluate, MetricTriple};
use crate::rolling_cv::{fold_seed, grid_search, FoldPlan, HyperGrid, HyperPoint, SearchOptions, SplitConfig, StackMode, TuningResult};
use crate::seed;

#[derive(Debug, Clone, Copy)]
pub struct RunSettings {
    pub train_fraction: f64,
    pub stack: StackMode,
    pub seed: u64,
    /// Used for the grid search inside the run.
    pub exec: Execution,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            stack: StackMode::Rolling,
            seed: 0,
            exec: Execution::Sequential,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub tuning: TuningResult,
    /// Scaled forecast of the test row.
    pub forecast: Vec<f64>,
    /// Scaled test row.
    pub actual: Vec<f64>,
    pub metrics: MetricTriple,
}

/// One Monte-Carlo run on a window of `L + 1` raw rows.
///
/// The scaler is fitted on rows `1..=L`. Tuning sees only those rows, with
/// `L_tr = floor(fraction * L)`. The best point is refitted on all `L` rows
/// and its forecast of row `L + 1` is scored in scaled space, with rows
/// `1..=L` as the MASE history.
pub fn run_single(
    window: RowsView<'_>,
    spec: &ModelSpec,
    grid: &HyperGrid,
    settings: &RunSettings,
) -> Result<RunOutcome, HarnessError> {
    if window.rows() < 3 {
        return Err(HarnessError::Window(format!("{} rows cannot hold history and a test row", window.rows())));
    }
    let l = window.rows() - 1;
    let scaler = ScalingTransform::fit(window.head(l));
    let scaled = scaler.apply_rows(window)?;
    let scaled = RowsView::new(&scaled, window.cols());
    let history = scaled.head(l);

    let config = SplitConfig::from_fraction(l, settings.train_fraction, None);
    let opts = SearchOptions {
        stack: settings.stack,
        seed: settings.seed,
        exec: settings.exec,
    };
    let tuning = grid_search(spec, grid, history, config, &opts)?;

    let best = tuning.best();
    let inner = spec.inner_length(best)?;
    let fold = FoldPlan::final_fold(spec.scheme(), l, inner)?;
    let mut model = spec.build(best, fold_seed(settings.seed, tuning.best_index, config.validation()))?;
    model.fit(history, &fold.training)?;
    let forecast = model.predict(history, fold.input)?;
    let actual = scaled.row(l).to_vec();
    let metrics = evaluate(&actual, &forecast, history)?;
    Ok(RunOutcome {
        tuning,
        forecast,
        actual,
        metrics,
    })
}

/// Per-run record kept in the report detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// 1-based run number.
    pub run: usize,
    /// 1-based first row of the window in the dataset.
    pub start: usize,
    pub best: HyperPoint,
    /// Mean validation sMAPE of the best point.
    pub cv_smape: f64,
    pub smape: f64,
    pub maape: f64,
    pub mase: Option<f64>,
}

struct Cell {
    dataset: usize,
    model: usize,
    window: usize,
    starts: Result<Vec<usize>, String>,
}

/// Runs the full dataset x model x window x run product.
///
/// Runs are independent units scheduled through `exec`; each gets a seed
/// derived from the root seed and its indices, so the report does not
/// depend on the schedule. A failing dataset, window or run marks its cell
/// as failed and leaves the other cells alone.
pub fn run_benchmark(cfg: &ExperimentConfig, base_dir: &Path, exec: Execution) -> BenchmarkReport {
    let data: Vec<Result<SeriesMatrix, String>> = cfg
        .datasets
        .iter()
        .map(|d| d.load(base_dir).map_err(|e| e.to_string()))
        .collect();

    let mut cells = Vec::new();
    for (d, loaded) in data.iter().enumerate() {
        for m in 0..cfg.models.len() {
            for (w, &len) in cfg.window_lengths.iter().enumerate() {
                let starts = loaded.as_ref().map_err(Clone::clone).and_then(|matrix| {
                    let window_seed = seed::derive(cfg.seed, &[d as u64, w as u64]);
                    sample_windows(matrix.rows(), len, cfg.monte_carlo_runs, cfg.window_sampling, window_seed)
                        .map_err(|e| e.to_string())
                });
                cells.push(Cell {
                    dataset: d,
                    model: m,
                    window: w,
                    starts,
                });
            }
        }
    }

    let units: Vec<(usize, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, cell)| {
            let runs = cell.starts.as_ref().map_or(0, Vec::len);
            (0..runs).map(move |r| (c, r))
        })
        .collect();

    let results = exec.map(&units, |&(c, r)| {
        let cell = &cells[c];
        let start = cell.starts.as_ref().expect("only cells with starts have units")[r];
        let matrix = data[cell.dataset].as_ref().expect("dataset loaded");
        let entry = &cfg.models[cell.model];
        let len = cfg.window_lengths[cell.window];
        let window = matrix.view().select(crate::dataset::RowRange::new(start, start + len));
        let settings = RunSettings {
            train_fraction: cfg.train_fraction,
            stack: entry.stack(),
            seed: seed::derive(cfg.seed, &[cell.dataset as u64, cell.model as u64, cell.window as u64, r as u64]),
            exec: Execution::Sequential,
        };
        let outcome = entry
            .spec()
            .map_err(HarnessError::from)
            .and_then(|spec| run_single(window, &spec, &entry.grid(), &settings));
        outcome
            .map(|o| RunRecord {
                run: r + 1,
                start,
                best: o.tuning.best().clone(),
                cv_smape: o.tuning.best_error(),
                smape: o.metrics.smape,
                maape: o.metrics.maape,
                mase: o.metrics.mase,
            })
            .map_err(|e| format!("run {} (start {start}): {e}", r + 1))
    });

    let mut results = results.into_iter();
    let reports = cells
        .iter()
        .map(|cell| {
            let entry = &cfg.models[cell.model];
            let len = cfg.window_lengths[cell.window];
            let mut report = CellReport {
                dataset: cfg.datasets[cell.dataset].name.clone(),
                model: entry.label().to_string(),
                family: entry.family,
                scheme: entry.spec().map(|s| s.scheme).unwrap_or(entry.family.default_scheme()),
                window: len,
                train_rows: SplitConfig::from_fraction(len, cfg.train_fraction, None).train,
                runs: Vec::new(),
                error: None,
                mean: None,
            };
            match &cell.starts {
                Err(e) => report.error = Some(e.clone()),
                Ok(starts) => {
                    for _ in starts {
                        match results.next().expect("one result per unit") {
                            Ok(record) => report.runs.push(record),
                            Err(e) => {
                                report.error.get_or_insert(e);
                            }
                        }
                    }
                }
            }
            report.summarize();
            report
        })
        .collect();

    BenchmarkReport {
        seed: cfg.seed,
        metric_space: cfg.metric_space,
        config: cfg.clone(),
        cells: reports,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecasters::ModelFamily;
    use crate::synthetic;

    #[test]
    fn naive_on_repeated_test_row_scores_zero() {
        let mut rows: Vec<Vec<f64>> = (0..41).map(|i| vec![i as f64, (i * i % 7) as f64 + 1.0]).collect();
        rows[40] = rows[39].clone();
        let m = SeriesMatrix::from_rows(&rows).unwrap();
        let out = run_single(m.view(), &ModelSpec::new(ModelFamily::Naive), &HyperGrid::default(), &RunSettings::default()).unwrap();
        assert_eq!(out.metrics.smape, 0.0);
        assert_eq!(out.metrics.maape, 0.0);
        assert_eq!(out.metrics.mase, Some(0.0));
        assert_eq!(out.tuning.fold_errors[0].len(), 8);
    }

    #[test]
    fn naive_on_constant_series_is_exact() {
        let m = synthetic::constant(3, 41, 5.0);
        let out = run_single(m.view(), &ModelSpec::new(ModelFamily::Naive), &HyperGrid::default(), &RunSettings::default()).unwrap();
        assert_eq!(out.metrics.smape, 0.0);
    }

    #[test]
    fn ninety_row_window_has_eighteen_folds() {
        let m = synthetic::random_walk(2, 91, 3);
        let grid = HyperGrid::default().axis("p", [1i64]).axis("lambda", [0.1]);
        let out = run_single(m.view(), &ModelSpec::new(ModelFamily::RidgeAr), &grid, &RunSettings::default()).unwrap();
        assert_eq!(out.tuning.fold_errors[0].len(), 18);
        assert_eq!(out.forecast.len(), 2);
    }
}
