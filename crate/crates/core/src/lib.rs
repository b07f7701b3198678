//! Single-step forecasting of many short, co-observed time series.
//!
//! The crate is organised around the evaluation protocol:
//!
//! * [`dataset`] loads wide CSV files into a [`SeriesMatrix`] (rows are time
//!   steps, columns are sensors), resamples, slices and min-max scales them.
//! * [`rolling_cv`] enumerates rolling-window fold plans for the three data
//!   shapes (matrix, multi-dimensional matrix, matrix list) and runs an
//!   exhaustive grid search that minimises the mean validation sMAPE.
//! * [`forecasters`] holds the models: a naive baseline, global ridge
//!   autoregression, linear ε-SVR, random forest, a windowed ridge regressor
//!   and an echo state network.
//! * [`metrics`] implements sMAPE, MAAPE and MASE for one forecast row.
//! * [`harness`] runs Monte-Carlo windows over datasets and assembles reports.
//!
//! Grid points and benchmark cells are evaluated through [`Execution`], which
//! uses rayon when the `parallel` feature is enabled and falls back to plain
//! iteration otherwise. Both paths produce identical results.

pub mod dataset;
pub mod exec;
pub mod forecasters;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod rolling_cv;
pub mod seed;
pub mod synthetic;

pub use dataset::{RowRange, RowsView, ScalingTransform, SeriesMatrix};
pub use exec::Execution;
pub use forecasters::{Forecaster, ModelError, ModelFamily, ModelSpec};
pub use metrics::{ForecastPair, MaseContext};
pub use rolling_cv::{FoldPlan, HyperGrid, HyperPoint, HyperValue, Scheme, SplitConfig, TuningResult};
