use super::forest::{ForestParams, RandomForest};
use super::ridge::{fit_ridge, LinearModel};
use super::svr::{fit_linear_svr, SvrOptions};
use super::{Forecaster, ModelError};
use crate::dataset::{RowRange, RowsView};
use crate::exec::Execution;
use crate::rolling_cv::TrainingSet;

/// Supervised samples `(y[l-p..l-1], y[l])` cut from one block of rows.
///
/// Samples are ordered series-major: all samples of column 0, then column 1,
/// and so on. Features run oldest lag first.
#[derive(Debug, Clone, PartialEq)]
pub struct LagEmbedding {
    pub lag: usize,
    features: Vec<f64>,
    targets: Vec<f64>,
}

impl LagEmbedding {
    /// Pools the samples of every column of `block`.
    pub fn pooled(block: RowsView<'_>, lag: usize) -> Result<Self, ModelError> {
        Self::build(block, lag, 0..block.cols())
    }

    /// Samples of a single column.
    pub fn single(block: RowsView<'_>, lag: usize, col: usize) -> Result<Self, ModelError> {
        Self::build(block, lag, col..col + 1)
    }

    fn build(block: RowsView<'_>, lag: usize, cols: std::ops::Range<usize>) -> Result<Self, ModelError> {
        if lag == 0 || lag >= block.rows() {
            return Err(ModelError::TooFewRows { rows: block.rows(), lag });
        }
        if block.data().iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("training rows"));
        }
        let per_series = block.rows() - lag;
        let mut features = Vec::with_capacity(per_series * cols.len() * lag);
        let mut targets = Vec::with_capacity(per_series * cols.len());
        for n in cols {
            for l in lag..block.rows() {
                features.extend((l - lag..l).map(|r| block.get(r, n)));
                targets.push(block.get(l, n));
            }
        }
        Ok(Self { lag, features, targets })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.lag..(i + 1) * self.lag]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

/// The last `lag` values of column `col`, oldest first.
fn lag_features(block: RowsView<'_>, lag: usize, col: usize) -> Vec<f64> {
    (block.rows() - lag..block.rows()).map(|r| block.get(r, col)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum LagLearner {
    Ridge { lambda: f64 },
    Svr(SvrOptions),
    Forest {
        params: ForestParams,
        seed: u64,
        exec: Execution,
    },
}

#[derive(Debug, Clone)]
enum Fitted {
    Linear(LinearModel),
    Forest(RandomForest),
}

impl Fitted {
    fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Fitted::Linear(m) => m.predict(x),
            Fitted::Forest(f) => f.predict(x),
        }
    }
}

/// Regressor on lag features, shared by ridge AR, linear SVR and the random
/// forest. Trains on every row of the fold's training material.
#[derive(Debug, Clone)]
pub struct LagForecaster {
    lag: usize,
    learner: LagLearner,
    per_series: bool,
    fitted: Vec<Fitted>,
}

impl LagForecaster {
    pub fn new(lag: usize, learner: LagLearner, per_series: bool) -> Result<Self, ModelError> {
        if lag == 0 {
            return Err(ModelError::InvalidHyper {
                name: "p".into(),
                reason: "lag order must be positive".into(),
            });
        }
        Ok(Self {
            lag,
            learner,
            per_series,
            fitted: Vec::new(),
        })
    }

    pub fn lag(&self) -> usize {
        self.lag
    }

    /// Fits on a contiguous block of rows.
    pub fn fit_block(&mut self, block: RowsView<'_>) -> Result<(), ModelError> {
        self.fitted = if self.per_series {
            (0..block.cols())
                .map(|n| self.train(&LagEmbedding::single(block, self.lag, n)?, n as u64))
                .collect::<Result<_, _>>()?
        } else {
            vec![self.train(&LagEmbedding::pooled(block, self.lag)?, 0)?]
        };
        Ok(())
    }

    fn train(&self, samples: &LagEmbedding, stream: u64) -> Result<Fitted, ModelError> {
        Ok(match &self.learner {
            LagLearner::Ridge { lambda } => Fitted::Linear(fit_ridge(samples, *lambda)),
            LagLearner::Svr(opts) => Fitted::Linear(fit_linear_svr(samples, opts).model),
            LagLearner::Forest { params, seed, exec } => {
                let seed = crate::seed::derive(*seed, &[stream]);
                Fitted::Forest(RandomForest::fit(samples, params, seed, *exec)?)
            }
        })
    }

    /// Forecasts the row after `block`.
    pub fn predict_block(&self, block: RowsView<'_>) -> Result<Vec<f64>, ModelError> {
        let Some(first) = self.fitted.first() else {
            return Err(ModelError::NotFitted);
        };
        if block.rows() < self.lag {
            return Err(ModelError::Dimension {
                what: "input rows",
                expected: self.lag,
                found: block.rows(),
            });
        }
        if self.per_series && block.cols() != self.fitted.len() {
            return Err(ModelError::Dimension {
                what: "series",
                expected: self.fitted.len(),
                found: block.cols(),
            });
        }
        let out: Vec<f64> = (0..block.cols())
            .map(|n| {
                let model = if self.per_series { &self.fitted[n] } else { first };
                model.predict(&lag_features(block, self.lag, n))
            })
            .collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("forecast"));
        }
        Ok(out)
    }
}

impl Forecaster for LagForecaster {
    fn fit(&mut self, data: RowsView<'_>, training: &TrainingSet) -> Result<(), ModelError> {
        match training {
            // The pair's input block and its target are consecutive rows, so
            // both cases embed one contiguous span.
            TrainingSet::Pair { .. } | TrainingSet::Window(_) => self.fit_block(data.select(training.span())),
            TrainingSet::Stack(_) => Err(ModelError::UnsupportedScheme {
                family: self.family(),
                scheme: "multi-dim-window",
            }),
            TrainingSet::Sequences(_) => Err(ModelError::UnsupportedScheme {
                family: self.family(),
                scheme: "matrix-list",
            }),
        }
    }

    fn predict(&self, data: RowsView<'_>, input: RowRange) -> Result<Vec<f64>, ModelError> {
        self.predict_block(data.select(input))
    }
}

impl LagForecaster {
    fn family(&self) -> super::ModelFamily {
        match self.learner {
            LagLearner::Ridge { .. } => super::ModelFamily::RidgeAr,
            LagLearner::Svr(_) => super::ModelFamily::LinearSvr,
            LagLearner::Forest { .. } => super::ModelFamily::RandomForest,
        }
    }
}
