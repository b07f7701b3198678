//! The Monte-Carlo benchmark: window sampling, per-run tuning and testing,
//! and report assembly.

mod config;
mod report;
mod run;
mod windows;

use std::path::PathBuf;

pub use config::{DatasetEntry, DatasetSource, ExperimentConfig, MetricSpace, ModelEntry, WindowSampling};
pub use report::{BenchmarkReport, CellMeans, CellReport, ReportFiles};
pub use run::{run_benchmark, run_single, RunOutcome, RunRecord, RunSettings};
pub use windows::sample_windows;

use crate::dataset::DatasetError;
use crate::forecasters::ModelError;
use crate::metrics::MetricError;
use crate::rolling_cv::CvError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config {key}: {message}")]
    Config { key: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Cv(#[from] CvError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("window: {0}")]
    Window(String),
    #[error("report: {0}")]
    Report(String),
}
