use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::dataset::{load_csv, CsvSchema, Recipe, SeriesMatrix};
use crate::forecasters::{ModelError, ModelFamily, ModelSpec};
use crate::rolling_cv::{HyperGrid, Scheme, StackMode};
use crate::synthetic::SyntheticSpec;

/// Where a dataset comes from. Relative paths are resolved against the
/// directory of the experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetSource {
    /// A preparation recipe (JSON).
    Recipe(PathBuf),
    /// An already prepared wide CSV file.
    Csv(PathBuf),
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub name: String,
    #[serde(flatten)]
    pub source: DatasetSource,
}

impl DatasetEntry {
    pub fn load(&self, base_dir: &Path) -> Result<SeriesMatrix, HarnessError> {
        let resolve = |p: &Path| if p.is_relative() { base_dir.join(p) } else { p.to_path_buf() };
        Ok(match &self.source {
            DatasetSource::Recipe(path) => Recipe::from_path(resolve(path))?.prepare()?,
            DatasetSource::Csv(path) => load_csv(resolve(path), &CsvSchema::default())?,
            DatasetSource::Synthetic(spec) => spec.generate(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    /// Label in reports; defaults to the family name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub family: ModelFamily,
    /// Defaults to the family's usual scheme.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    /// Defaults to the family's documented grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<HyperGrid>,
    #[serde(default)]
    pub per_series: bool,
    /// Keep the first fold's training stack for every fold (windowed schemes).
    #[serde(default)]
    pub fixed_stack: bool,
}

impl ModelEntry {
    pub fn new(family: ModelFamily) -> Self {
        Self {
            name: None,
            family,
            scheme: None,
            grid: None,
            per_series: false,
            fixed_stack: false,
        }
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(self.family.name())
    }

    pub fn spec(&self) -> Result<ModelSpec, ModelError> {
        let spec = ModelSpec::new(self.family).per_series(self.per_series);
        match self.scheme {
            Some(s) => spec.with_scheme(s),
            None => Ok(spec),
        }
    }

    pub fn grid(&self) -> HyperGrid {
        self.grid.clone().unwrap_or_else(|| self.family.default_grid())
    }

    pub fn stack(&self) -> StackMode {
        if self.fixed_stack {
            StackMode::Fixed
        } else {
            StackMode::Rolling
        }
    }
}

/// How Monte-Carlo window starts are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowSampling {
    /// Evenly spaced over the valid range; ignores the seed.
    #[default]
    Even,
    /// Distinct uniform draws from the valid range, sorted.
    Random,
}

/// Space in which test metrics are computed. Only the min-max scaled space
/// of each window is supported; the field exists so reports state it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricSpace {
    #[default]
    Scaled,
}

fn default_windows() -> Vec<usize> {
    vec![40, 90]
}

fn default_fraction() -> f64 {
    0.8
}

fn default_runs() -> usize {
    15
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetEntry>,
    pub models: Vec<ModelEntry>,
    #[serde(default = "default_windows")]
    pub window_lengths: Vec<usize>,
    #[serde(default = "default_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_runs")]
    pub monte_carlo_runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub window_sampling: WindowSampling,
    #[serde(default)]
    pub metric_space: MetricSpace,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Config {
            key: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |key: &str, message: String| {
            Err(HarnessError::Config {
                key: key.into(),
                message,
            })
        };
        if self.datasets.is_empty() {
            return bad("datasets", "at least one dataset is required".into());
        }
        if self.models.is_empty() {
            return bad("models", "at least one model is required".into());
        }
        if self.window_lengths.is_empty() {
            return bad("window_lengths", "at least one window length is required".into());
        }
        if self.monte_carlo_runs == 0 {
            return bad("monte_carlo_runs", "must be at least 1".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad("train_fraction", format!("{} is not in (0, 1)", self.train_fraction));
        }
        for (i, m) in self.models.iter().enumerate() {
            if let Err(e) = m.spec() {
                return bad(&format!("models[{i}].scheme"), e.to_string());
            }
        }
        for (i, w) in self.window_lengths.iter().enumerate() {
            let train = (*w as f64 * self.train_fraction).floor() as usize;
            if train < 2 || train >= *w {
                return bad(
                    &format!("window_lengths[{i}]"),
                    format!("window {w} leaves {train} training rows"),
                );
            }
        }
        for (i, d) in self.datasets.iter().enumerate() {
            if self.datasets[..i].iter().any(|o| o.name == d.name) {
                return bad(&format!("datasets[{i}].name"), format!("duplicate name {:?}", d.name));
            }
        }
        Ok(())
    }
}
