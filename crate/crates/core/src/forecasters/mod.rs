//! Single-step forecasters behind one interface.
//!
//! A [`Forecaster`] is fitted on the training material of one fold (built by
//! a [`FoldPlan`](crate::rolling_cv::FoldPlan)) and then forecasts the row
//! after a block of input rows. All models work on min-max scaled data.
//!
//! | family          | scheme(s)                              | model |
//! |-----------------|----------------------------------------|-------|
//! | `naive`         | any                                    | repeat the last row |
//! | `ridge-ar`      | matrix-full-window (default), pairs    | global ridge autoregression on lag features |
//! | `linear-svr`    | matrix-pairs (default), full-window    | global linear ε-SVR on lag features |
//! | `random-forest` | matrix-pairs (default), full-window    | CART forest on lag features |
//! | `window-ridge`  | multi-dim-window                       | ridge map from an `S x N` window to the next row |
//! | `esn`           | matrix-list                            | leaky echo state network with ridge readout |
//!
//! The lag-feature models are global by default: samples from every series
//! are pooled into one training set. `per_series` fits one model per column.

mod esn;
mod forest;
mod lag;
mod naive;
mod ridge;
mod svr;
mod window;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use esn::{EchoStateNetwork, EsnParams, Reservoir};
pub use forest::{ForestParams, RandomForest, RegressionTree};
pub use lag::{LagEmbedding, LagForecaster, LagLearner};
pub use naive::{naive_last, NaiveLast};
pub use ridge::{fit_ridge, LinearModel};
pub use svr::{dual_objective, fit_linear_svr, primal_objective, SvrFit, SvrOptions};
pub use window::WindowRidge;

use crate::dataset::{RowRange, RowsView};
use crate::exec::Execution;
use crate::rolling_cv::{HyperGrid, HyperPoint, Scheme, TrainingSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("predict called before fit")]
    NotFitted,
    #[error("{family} cannot train on {scheme} material")]
    UnsupportedScheme { family: ModelFamily, scheme: &'static str },
    #[error("hyper-parameter {0:?} is required")]
    MissingHyper(String),
    #[error("hyper-parameter {name:?}: {reason}")]
    InvalidHyper { name: String, reason: String },
    #[error("{rows} training rows cannot support lag {lag}")]
    TooFewRows { rows: usize, lag: usize },
    #[error("expected {expected} {what}, got {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite values in {0}")]
    NonFinite(&'static str),
    #[error("training set is degenerate: {0}")]
    Degenerate(String),
}

/// A single-step forecaster.
pub trait Forecaster: Send {
    /// Fits the model on `training`, whose row ranges index into `data`.
    fn fit(&mut self, data: RowsView<'_>, training: &TrainingSet) -> Result<(), ModelError>;

    /// Forecasts the row that follows `input` (a 1-based range into `data`).
    fn predict(&self, data: RowsView<'_>, input: RowRange) -> Result<Vec<f64>, ModelError>;
}

/// Builds fresh models for grid search.
pub trait ModelFactory: Sync {
    fn scheme(&self) -> Scheme;

    /// Inner window `S` implied by a grid point, for the windowed schemes.
    fn inner_length(&self, point: &HyperPoint) -> Result<Option<usize>, ModelError>;

    fn build(&self, point: &HyperPoint, seed: u64) -> Result<Box<dyn Forecaster>, ModelError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    Naive,
    RidgeAr,
    LinearSvr,
    RandomForest,
    WindowRidge,
    Esn,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 6] = [
        ModelFamily::Naive,
        ModelFamily::RidgeAr,
        ModelFamily::LinearSvr,
        ModelFamily::RandomForest,
        ModelFamily::WindowRidge,
        ModelFamily::Esn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Naive => "naive",
            ModelFamily::RidgeAr => "ridge-ar",
            ModelFamily::LinearSvr => "linear-svr",
            ModelFamily::RandomForest => "random-forest",
            ModelFamily::WindowRidge => "window-ridge",
            ModelFamily::Esn => "esn",
        }
    }

    pub fn default_scheme(self) -> Scheme {
        match self {
            ModelFamily::Naive | ModelFamily::LinearSvr | ModelFamily::RandomForest => Scheme::MatrixPairs,
            ModelFamily::RidgeAr => Scheme::MatrixFullWindow,
            ModelFamily::WindowRidge => Scheme::MultiDimWindow,
            ModelFamily::Esn => Scheme::MatrixList,
        }
    }

    pub fn supports(self, scheme: Scheme) -> bool {
        match self {
            ModelFamily::Naive => true,
            ModelFamily::RidgeAr | ModelFamily::LinearSvr | ModelFamily::RandomForest => {
                matches!(scheme, Scheme::MatrixPairs | Scheme::MatrixFullWindow)
            }
            ModelFamily::WindowRidge => scheme == Scheme::MultiDimWindow,
            ModelFamily::Esn => scheme == Scheme::MatrixList,
        }
    }

    /// Default search grid, sized for windows of 40 to 90 rows. Lag and
    /// window 24 cover a daily cycle at hourly resolution. The SVR sweep cap
    /// and the shallow forest keep a 15-run benchmark on a few hundred series
    /// within minutes on one core.
    pub fn default_grid(self) -> HyperGrid {
        let g = HyperGrid::default();
        match self {
            ModelFamily::Naive => g,
            ModelFamily::RidgeAr => g
                .axis("p", [1i64, 2, 4, 8, 16, 24])
                .axis("lambda", [1e-3, 1e-1, 10.0]),
            ModelFamily::LinearSvr => g
                .axis("p", [4i64, 24])
                .axis("c", [0.1, 1.0])
                .axis("epsilon", [0.0, 0.01])
                .axis("max_sweeps", [100i64]),
            ModelFamily::RandomForest => g
                .axis("p", [8i64, 24])
                .axis("trees", [20i64])
                .axis("max_depth", [8i64])
                .axis("min_leaf", [5i64])
                .axis("feature_frac", [0.33]),
            ModelFamily::WindowRidge => g.axis("s", [1i64, 4, 24]).axis("lambda", [0.1, 1.0, 10.0]),
            ModelFamily::Esn => g
                .axis("s", [4i64, 8])
                .axis("reservoir", [50i64])
                .axis("spectral_radius", [0.5, 0.9])
                .axis("leak", [0.5, 1.0])
                .axis("lambda", [1e-2, 1.0])
                .axis("input_scaling", [0.1]),
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelFamily {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| ModelError::InvalidHyper {
                name: "family".into(),
                reason: format!("unknown model family {s:?}"),
            })
    }
}

/// A model family bound to a scheme and pooling mode; the factory used by
/// grid search and the harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub scheme: Scheme,
    pub per_series: bool,
    /// How a random forest evaluates its trees.
    pub exec: Execution,
}

impl ModelSpec {
    pub fn new(family: ModelFamily) -> Self {
        Self {
            family,
            scheme: family.default_scheme(),
            per_series: false,
            exec: Execution::Sequential,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Result<Self, ModelError> {
        if !self.family.supports(scheme) {
            return Err(ModelError::UnsupportedScheme {
                family: self.family,
                scheme: scheme.name(),
            });
        }
        self.scheme = scheme;
        Ok(self)
    }

    pub fn per_series(mut self, yes: bool) -> Self {
        self.per_series = yes;
        self
    }
}

impl ModelFactory for ModelSpec {
    fn scheme(&self) -> Scheme {
        self.scheme
    }

    fn inner_length(&self, point: &HyperPoint) -> Result<Option<usize>, ModelError> {
        if !self.scheme.needs_inner() {
            return Ok(None);
        }
        let s = Hyper(point).usize("s")?;
        if s == 0 {
            return Err(ModelError::InvalidHyper {
                name: "s".into(),
                reason: "must be positive".into(),
            });
        }
        Ok(Some(s))
    }

    fn build(&self, point: &HyperPoint, seed: u64) -> Result<Box<dyn Forecaster>, ModelError> {
        let h = Hyper(point);
        let lag_model = |learner| -> Result<Box<dyn Forecaster>, ModelError> {
            Ok(Box::new(LagForecaster::new(h.usize("p")?, learner, self.per_series)?))
        };
        match self.family {
            ModelFamily::Naive => Ok(Box::new(NaiveLast)),
            ModelFamily::RidgeAr => lag_model(LagLearner::Ridge {
                lambda: h.non_negative("lambda")?,
            }),
            ModelFamily::LinearSvr => {
                let mut opts = SvrOptions::new(h.positive("c")?, h.non_negative_or("epsilon", 0.0)?);
                opts.tolerance = h.non_negative_or("tol", opts.tolerance)?;
                if h.0.get("max_sweeps").is_some() {
                    opts.max_sweeps = Some(h.usize("max_sweeps")?.max(1));
                }
                lag_model(LagLearner::Svr(opts))
            }
            ModelFamily::RandomForest => lag_model(LagLearner::Forest {
                params: ForestParams {
                    trees: h.usize_or("trees", 50)?,
                    max_depth: h.depth("max_depth")?,
                    min_leaf: h.usize_or("min_leaf", 1)?.max(1),
                    feature_frac: h.fraction_or("feature_frac", 1.0)?,
                    bootstrap: h.bool_or("bootstrap", true)?,
                },
                seed,
                exec: self.exec,
            }),
            ModelFamily::WindowRidge => Ok(Box::new(WindowRidge::new(h.non_negative("lambda")?))),
            ModelFamily::Esn => Ok(Box::new(EchoStateNetwork::new(
                EsnParams {
                    reservoir: h.usize("reservoir")?,
                    spectral_radius: h.non_negative("spectral_radius")?,
                    leak: h.fraction_or("leak", 1.0)?,
                    ridge: h.non_negative("lambda")?,
                    input_scaling: h.non_negative_or("input_scaling", 1.0)?,
                },
                // an explicit reservoir seed keeps the reservoir fixed across folds
                h.usize_or("seed", seed as usize)? as u64,
            )?)),
        }
    }
}

/// Typed accessors over a grid point.
struct Hyper<'a>(&'a HyperPoint);

impl Hyper<'_> {
    fn invalid(name: &str, reason: &str) -> ModelError {
        ModelError::InvalidHyper {
            name: name.into(),
            reason: reason.into(),
        }
    }

    fn usize(&self, name: &str) -> Result<usize, ModelError> {
        let v = self.0.get(name).ok_or_else(|| ModelError::MissingHyper(name.into()))?;
        v.as_usize().ok_or_else(|| Self::invalid(name, "expected a non-negative integer"))
    }

    fn usize_or(&self, name: &str, default: usize) -> Result<usize, ModelError> {
        if self.0.get(name).is_none() {
            return Ok(default);
        }
        self.usize(name)
    }

    fn real(&self, name: &str) -> Result<f64, ModelError> {
        let v = self.0.get(name).ok_or_else(|| ModelError::MissingHyper(name.into()))?;
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Self::invalid(name, "expected a finite number"))
    }

    fn non_negative(&self, name: &str) -> Result<f64, ModelError> {
        let x = self.real(name)?;
        if x < 0.0 {
            return Err(Self::invalid(name, "must be >= 0"));
        }
        Ok(x)
    }

    fn non_negative_or(&self, name: &str, default: f64) -> Result<f64, ModelError> {
        if self.0.get(name).is_none() {
            return Ok(default);
        }
        self.non_negative(name)
    }

    fn positive(&self, name: &str) -> Result<f64, ModelError> {
        let x = self.real(name)?;
        if x <= 0.0 {
            return Err(Self::invalid(name, "must be > 0"));
        }
        Ok(x)
    }

    fn fraction_or(&self, name: &str, default: f64) -> Result<f64, ModelError> {
        if self.0.get(name).is_none() {
            return Ok(default);
        }
        let x = self.real(name)?;
        if !(x > 0.0 && x <= 1.0) {
            return Err(Self::invalid(name, "must lie in (0, 1]"));
        }
        Ok(x)
    }

    fn bool_or(&self, name: &str, default: bool) -> Result<bool, ModelError> {
        match self.0.get(name) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or_else(|| Self::invalid(name, "expected true or false")),
        }
    }

    /// `None` means unlimited depth.
    fn depth(&self, name: &str) -> Result<Option<usize>, ModelError> {
        match self.0.get(name) {
            None => Ok(None),
            Some(v) if v.as_tag() == Some("unlimited") => Ok(None),
            Some(v) => v
                .as_usize()
                .map(Some)
                .ok_or_else(|| Self::invalid(name, "expected an integer or \"unlimited\"")),
        }
    }
}
