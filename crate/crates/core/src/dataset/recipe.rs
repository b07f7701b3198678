use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::csv_io::{load_csv, CsvSchema, MissingPolicy};
use super::{resample_mean, resample_sum, DatasetError, Result, SeriesMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleOp {
    Mean,
    Sum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleSpec {
    pub op: ResampleOp,
    pub group_size: usize,
}

/// JSON dataset preparation recipe.
///
/// ```json
/// {
///   "source_path": "raw/guangzhou_10min.csv",
///   "timestamp_column": "time",
///   "missing_policy": "drop",
///   "zero_is_missing": true,
///   "resample": { "op": "mean", "group_size": 6 },
///   "resolution": "hourly"
/// }
/// ```
///
/// A relative `source_path` is resolved against the recipe file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub source_path: PathBuf,
    #[serde(default)]
    pub missing_policy: MissingPolicy,
    #[serde(default)]
    pub resample: Option<ResampleSpec>,
    #[serde(default)]
    pub keep_columns: Option<Vec<String>>,
    #[serde(default)]
    pub timestamp_column: Option<String>,
    #[serde(default)]
    pub zero_is_missing: bool,
    #[serde(default)]
    pub resolution: Option<String>,
}

impl Recipe {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut recipe: Recipe = serde_json::from_str(&text).map_err(|e| DatasetError::Recipe {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if recipe.source_path.is_relative() {
            if let Some(dir) = path.parent() {
                recipe.source_path = dir.join(&recipe.source_path);
            }
        }
        if recipe.resample.as_ref().is_some_and(|r| r.group_size == 0) {
            return Err(DatasetError::Recipe {
                path: path.to_path_buf(),
                message: "resample.group_size must be positive".into(),
            });
        }
        Ok(recipe)
    }

    /// Loads the source file, filters incomplete columns and resamples.
    pub fn prepare(&self) -> Result<SeriesMatrix> {
        let schema = CsvSchema {
            timestamp_column: self.timestamp_column.clone(),
            value_columns: self.keep_columns.clone(),
            missing: self.missing_policy,
            zero_is_missing: self.zero_is_missing,
            resolution: None,
        };
        let raw = load_csv(&self.source_path, &schema)?;
        let mut m = match &self.resample {
            Some(ResampleSpec {
                op: ResampleOp::Mean,
                group_size,
            }) => resample_mean(&raw, *group_size)?,
            Some(ResampleSpec {
                op: ResampleOp::Sum,
                group_size,
            }) => resample_sum(&raw, *group_size)?,
            None => raw,
        };
        if let Some(res) = &self.resolution {
            m = m.with_resolution(res.clone());
        }
        Ok(m)
    }
}
