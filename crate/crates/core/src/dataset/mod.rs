//! Wide multivariate time-series data: loading, resampling, slicing, scaling.
//!
//! A [`SeriesMatrix`] stores `L` observations of `N` series row-major: row `l`
//! holds the `l`-th observation of every series. Public row indices on
//! [`SeriesMatrix`] and [`RowsView`] are 0-based; [`RowRange`] and
//! [`slice_window`] use 1-based inclusive indices because fold plans are
//! written that way.

mod csv_io;
mod recipe;
mod scaling;

use std::fmt;
use std::path::PathBuf;

pub use csv_io::{load_csv, load_csv_from_reader, write_csv, CsvSchema, MissingPolicy};
pub use recipe::{Recipe, ResampleOp, ResampleSpec};
pub use scaling::{apply_scaler, fit_scaler, invert_scaler, ScalingTransform};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: record {record} has {found} fields, header has {expected}")]
    Ragged {
        path: PathBuf,
        record: usize,
        found: usize,
        expected: usize,
    },
    #[error("{path}: record {record}, column {column:?}: cannot parse {value:?} as a number")]
    Parse {
        path: PathBuf,
        record: usize,
        column: String,
        value: String,
    },
    #[error("column {0:?} not present in header")]
    UnknownColumn(String),
    #[error("no usable value columns remain")]
    NoColumns,
    #[error("a series matrix needs at least {min} rows, got {rows}")]
    TooFewRows { rows: usize, min: usize },
    #[error("value buffer of length {len} is not a multiple of {cols} columns")]
    Shape { len: usize, cols: usize },
    #[error("{ids} series identifiers for {cols} columns")]
    IdCount { ids: usize, cols: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("{found} timestamps for {rows} rows")]
    TimestampCount { found: usize, rows: usize },
    #[error("resample group size must be positive")]
    ZeroGroupSize,
    #[error("window start {start} with length {length} does not fit in {rows} rows")]
    WindowOutOfRange {
        start: usize,
        length: usize,
        rows: usize,
    },
    #[error("expected {expected} columns, got {found}")]
    ColumnMismatch { expected: usize, found: usize },
    #[error("invalid recipe {path}: {message}")]
    Recipe { path: PathBuf, message: String },
}

pub type Result<T, E = DatasetError> = std::result::Result<T, E>;

/// Minimum number of observations a [`SeriesMatrix`] must hold.
pub const MIN_ROWS: usize = 2;

/// `L x N` observation matrix with series identifiers and provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
    series_ids: Vec<String>,
    resolution: String,
    origin_index: usize,
    timestamps: Option<Vec<String>>,
}

impl SeriesMatrix {
    /// Builds a matrix from a row-major buffer. Every value must be finite,
    /// there must be at least [`MIN_ROWS`] rows and one column.
    pub fn from_row_major(values: Vec<f64>, cols: usize, series_ids: Vec<String>) -> Result<Self> {
        if cols == 0 {
            return Err(DatasetError::NoColumns);
        }
        if !values.len().is_multiple_of(cols) {
            return Err(DatasetError::Shape {
                len: values.len(),
                cols,
            });
        }
        if series_ids.len() != cols {
            return Err(DatasetError::IdCount {
                ids: series_ids.len(),
                cols,
            });
        }
        let rows = values.len() / cols;
        if rows < MIN_ROWS {
            return Err(DatasetError::TooFewRows { rows, min: MIN_ROWS });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(DatasetError::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self {
            values,
            rows,
            cols,
            series_ids,
            resolution: "unknown".to_string(),
            origin_index: 1,
            timestamps: None,
        })
    }

    /// Builds a matrix from row vectors with generated ids `s1..sN`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(DatasetError::ColumnMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        let ids = (1..=cols).map(|n| format!("s{n}")).collect();
        Self::from_row_major(rows.concat(), cols, ids)
    }

    pub fn with_resolution(mut self, resolution: impl Into<String>) -> Self {
        self.resolution = resolution.into();
        self
    }

    /// Attaches one timestamp label per row.
    pub fn with_timestamps(mut self, timestamps: Vec<String>) -> Result<Self> {
        if timestamps.len() != self.rows {
            return Err(DatasetError::TimestampCount {
                found: timestamps.len(),
                rows: self.rows,
            });
        }
        self.timestamps = Some(timestamps);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn series_ids(&self) -> &[String] {
        &self.series_ids
    }

    pub fn resolution(&self) -> &str {
        &self.resolution
    }

    /// 1-based index of this matrix's first row within the source dataset.
    pub fn origin_index(&self) -> usize {
        self.origin_index
    }

    pub fn timestamps(&self) -> Option<&[String]> {
        self.timestamps.as_deref()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row `i` (0-based).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.values.iter().skip(col).step_by(self.cols).copied().collect()
    }

    pub fn view(&self) -> RowsView<'_> {
        RowsView::new(&self.values, self.cols)
    }

    /// Same metadata, new values of identical shape.
    fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            values,
            rows: self.rows,
            cols: self.cols,
            series_ids: self.series_ids.clone(),
            resolution: self.resolution.clone(),
            origin_index: self.origin_index,
            timestamps: self.timestamps.clone(),
        }
    }

    /// Keeps the listed columns (0-based) in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            let row = self.row(r);
            values.extend(cols.iter().map(|&c| row[c]));
        }
        let ids = cols.iter().map(|&c| self.series_ids[c].clone()).collect();
        let mut out = Self::from_row_major(values, cols.len(), ids)?;
        out.resolution = self.resolution.clone();
        out.origin_index = self.origin_index;
        out.timestamps = self.timestamps.clone();
        Ok(out)
    }
}

/// Borrowed row-major block of rows. May hold a single row, which is what a
/// forecaster sees when asked to predict from the last observation only.
#[derive(Debug, Clone, Copy)]
pub struct RowsView<'a> {
    data: &'a [f64],
    cols: usize,
}

impl<'a> RowsView<'a> {
    pub fn new(data: &'a [f64], cols: usize) -> Self {
        assert!(cols > 0 && data.len().is_multiple_of(cols), "row-major buffer shape");
        Self { data, cols }
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.cols
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &'a [f64] {
        self.data
    }

    /// Row `i` (0-based).
    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn last_row(&self) -> Option<&'a [f64]> {
        (!self.is_empty()).then(|| self.row(self.rows() - 1))
    }

    /// Rows `range.start..=range.end` (1-based, relative to this view).
    ///
    /// Panics when the range is out of bounds; fold plans are validated
    /// against the data length before they are used.
    pub fn select(&self, range: RowRange) -> RowsView<'a> {
        assert!(
            range.start >= 1 && range.end <= self.rows() && range.start <= range.end,
            "row range {range} outside 1..={}",
            self.rows()
        );
        RowsView {
            data: &self.data[(range.start - 1) * self.cols..range.end * self.cols],
            cols: self.cols,
        }
    }

    /// Rows `0..n` (0-based, exclusive end).
    pub fn head(&self, n: usize) -> RowsView<'a> {
        RowsView {
            data: &self.data[..n * self.cols],
            cols: self.cols,
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.data.to_vec()
    }
}

/// Inclusive 1-based row range `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RowRange {
    pub start: usize,
    pub end: usize,
}

impl RowRange {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start >= 1 && start <= end);
        Self { start, end }
    }

    pub fn single(row: usize) -> Self {
        Self::new(row, row)
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shifted(&self, by: usize) -> Self {
        Self::new(self.start + by, self.end + by)
    }
}

impl fmt::Display for RowRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}..{}", self.start, self.end)
        }
    }
}

fn resample_with(m: &SeriesMatrix, group_size: usize, reduce: impl Fn(f64) -> f64) -> Result<SeriesMatrix> {
    if group_size == 0 {
        return Err(DatasetError::ZeroGroupSize);
    }
    if group_size == 1 {
        return Ok(m.clone());
    }
    let groups = m.rows / group_size;
    let mut values = vec![0.0; groups * m.cols];
    for g in 0..groups {
        let out = &mut values[g * m.cols..(g + 1) * m.cols];
        for r in g * group_size..(g + 1) * group_size {
            for (acc, v) in out.iter_mut().zip(m.row(r)) {
                *acc += v;
            }
        }
        out.iter_mut().for_each(|v| *v = reduce(*v));
    }
    let mut out = SeriesMatrix::from_row_major(values, m.cols, m.series_ids.clone())?;
    out.resolution = format!("{group_size} x {}", m.resolution);
    out.origin_index = 1;
    out.timestamps = m
        .timestamps
        .as_ref()
        .map(|ts| ts.iter().step_by(group_size).take(groups).cloned().collect());
    Ok(out)
}

/// Averages consecutive groups of `group_size` rows. A trailing partial
/// group is dropped.
pub fn resample_mean(m: &SeriesMatrix, group_size: usize) -> Result<SeriesMatrix> {
    let g = group_size as f64;
    resample_with(m, group_size, |sum| sum / g)
}

/// Sums consecutive groups of `group_size` rows. A trailing partial group is
/// dropped.
pub fn resample_sum(m: &SeriesMatrix, group_size: usize) -> Result<SeriesMatrix> {
    resample_with(m, group_size, |sum| sum)
}

/// Contiguous window of `length` rows starting at 1-based row `start`.
pub fn slice_window(m: &SeriesMatrix, start: usize, length: usize) -> Result<SeriesMatrix> {
    let out_of_range = DatasetError::WindowOutOfRange {
        start,
        length,
        rows: m.rows,
    };
    if start == 0 || length == 0 || start + length - 1 > m.rows {
        return Err(out_of_range);
    }
    if length < MIN_ROWS {
        return Err(DatasetError::TooFewRows {
            rows: length,
            min: MIN_ROWS,
        });
    }
    let lo = (start - 1) * m.cols;
    let hi = lo + length * m.cols;
    let mut out = SeriesMatrix::from_row_major(m.values[lo..hi].to_vec(), m.cols, m.series_ids.clone())?;
    out.resolution = m.resolution.clone();
    out.origin_index = m.origin_index + start - 1;
    out.timestamps = m
        .timestamps
        .as_ref()
        .map(|ts| ts[start - 1..start - 1 + length].to_vec());
    Ok(out)
}
