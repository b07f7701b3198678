use serde::Serialize;

use super::{CvError, FoldPlan, HyperGrid, HyperPoint, SplitConfig, StackMode};
use crate::dataset::RowsView;
use crate::exec::Execution;
use crate::forecasters::ModelFactory;
use crate::metrics::{cv_objective, ForecastPair};
use crate::seed;

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchOptions {
    pub stack: StackMode,
    /// Root seed; each (grid point, fold) fit gets a seed derived from it.
    pub seed: u64,
    pub exec: Execution,
}

/// Outcome of an exhaustive grid search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuningResult {
    pub points: Vec<HyperPoint>,
    /// Mean validation error of each grid point.
    pub mean_errors: Vec<f64>,
    /// Per-fold validation errors of each grid point.
    pub fold_errors: Vec<Vec<f64>>,
    pub best_index: usize,
}

impl TuningResult {
    pub fn best(&self) -> &HyperPoint {
        &self.points[self.best_index]
    }

    pub fn best_error(&self) -> f64 {
        self.mean_errors[self.best_index]
    }
}

/// Seed for fitting grid point `point` on fold `fold` (both 0-based).
pub fn fold_seed(root: u64, point: usize, fold: usize) -> u64 {
    seed::derive(root, &[point as u64, fold as u64])
}

/// Trains and validates every grid point on every fold of the factory's
/// scheme, then picks the point with the smallest mean validation sMAPE.
/// Ties go to the earliest point in enumeration order.
///
/// `data` must hold exactly `config.total` rows; nothing outside it is read.
pub fn grid_search<F: ModelFactory + ?Sized>(
    factory: &F,
    grid: &HyperGrid,
    data: RowsView<'_>,
    config: SplitConfig,
    opts: &SearchOptions,
) -> Result<TuningResult, CvError> {
    if data.rows() != config.total {
        return Err(CvError::InvalidConfig(format!(
            "data has {} rows but the split expects {}",
            data.rows(),
            config.total
        )));
    }
    let points = grid.points();
    if points.is_empty() {
        return Err(CvError::InvalidGrid("grid has no points".into()));
    }
    let scheme = factory.scheme();
    let plans = points
        .iter()
        .enumerate()
        .map(|(g, point)| {
            let inner = factory
                .inner_length(point)
                .map_err(|source| CvError::Model { point: g, fold: 0, source })?;
            let cfg = SplitConfig {
                inner: if scheme.needs_inner() { inner } else { None },
                ..config
            };
            FoldPlan::build(scheme, cfg, opts.stack)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let folds = config.validation();
    let jobs = points.len() * folds;
    let errors = opts.exec.map_range(jobs, |job| {
        let (g, k) = (job / folds, job % folds);
        let fold = &plans[g].folds[k];
        let wrap = |source| CvError::Model {
            point: g,
            fold: k + 1,
            source,
        };
        let mut model = factory.build(&points[g], fold_seed(opts.seed, g, k)).map_err(wrap)?;
        model.fit(data, &fold.training).map_err(wrap)?;
        let predicted = model.predict(data, fold.input).map_err(wrap)?;
        let actual = data.row(fold.target - 1);
        let pair = ForecastPair::new(actual, &predicted).map_err(|e| CvError::InvalidConfig(e.to_string()))?;
        Ok(cv_objective(&pair))
    });

    let mut fold_errors = vec![Vec::with_capacity(folds); points.len()];
    for (job, e) in errors.into_iter().enumerate() {
        fold_errors[job / folds].push(e?);
    }
    let mean_errors: Vec<f64> = fold_errors
        .iter()
        .map(|e| e.iter().sum::<f64>() / e.len() as f64)
        .collect();
    let mut best_index = 0;
    for (g, &e) in mean_errors.iter().enumerate() {
        if e < mean_errors[best_index] || (mean_errors[best_index].is_nan() && !e.is_nan()) {
            best_index = g;
        }
    }
    Ok(TuningResult {
        points,
        mean_errors,
        fold_errors,
        best_index,
    })
}
