//! Rolling-window cross-validation: fold plans and grid search.
//!
//! Every scheme validates on rows `L_tr+1..=L`, one row per fold, sliding the
//! training material forward one row at a time.

mod grid;
mod plan;
mod search;

pub use grid::{HyperGrid, HyperPoint, HyperValue};
pub use plan::{
    plan_matrix_full_window, plan_matrix_list, plan_matrix_pairs, plan_multidim_window, Fold, FoldPlan, Scheme,
    SplitConfig, StackMode, TrainingSet,
};
pub use search::{fold_seed, grid_search, SearchOptions, TuningResult};

use crate::forecasters::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum CvError {
    #[error("invalid split: {0}")]
    InvalidConfig(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid point {point}, fold {fold}: {source}")]
    Model {
        point: usize,
        fold: usize,
        #[source]
        source: ModelError,
    },
}
