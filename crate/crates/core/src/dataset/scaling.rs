use serde::{Deserialize, Serialize};

use super::{DatasetError, Result, RowsView, SeriesMatrix};

/// Per-series min-max scaler. Constant columns are recorded as degenerate and
/// map to 0.0 instead of dividing by zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTransform {
    mins: Vec<f64>,
    maxs: Vec<f64>,
    degenerate: Vec<usize>,
}

impl ScalingTransform {
    /// Column-wise extrema over every row of `rows`.
    pub fn fit(rows: RowsView<'_>) -> Self {
        let n = rows.cols();
        let mut mins = vec![f64::INFINITY; n];
        let mut maxs = vec![f64::NEG_INFINITY; n];
        for r in 0..rows.rows() {
            for (c, &v) in rows.row(r).iter().enumerate() {
                mins[c] = mins[c].min(v);
                maxs[c] = maxs[c].max(v);
            }
        }
        let degenerate = (0..n).filter(|&c| mins[c] == maxs[c]).collect();
        Self { mins, maxs, degenerate }
    }

    pub fn cols(&self) -> usize {
        self.mins.len()
    }

    pub fn mins(&self) -> &[f64] {
        &self.mins
    }

    pub fn maxs(&self) -> &[f64] {
        &self.maxs
    }

    /// Indices of columns whose fitted max equals their min.
    pub fn degenerate_columns(&self) -> &[usize] {
        &self.degenerate
    }

    fn check(&self, found: usize) -> Result<()> {
        if found != self.cols() {
            return Err(DatasetError::ColumnMismatch {
                expected: self.cols(),
                found,
            });
        }
        Ok(())
    }

    /// Scales one row in place. Values outside the fitted range are not
    /// clipped.
    pub fn apply_row(&self, row: &mut [f64]) -> Result<()> {
        self.check(row.len())?;
        for ((v, &lo), &hi) in row.iter_mut().zip(&self.mins).zip(&self.maxs) {
            let span = hi - lo;
            *v = if span == 0.0 { 0.0 } else { (*v - lo) / span };
        }
        Ok(())
    }

    /// Scales a row-major block of rows.
    pub fn apply_rows(&self, rows: RowsView<'_>) -> Result<Vec<f64>> {
        self.check(rows.cols())?;
        let mut out = rows.to_vec();
        for chunk in out.chunks_mut(self.cols()) {
            self.apply_row(chunk)?;
        }
        Ok(out)
    }

    /// Maps a scaled row back to original units. Degenerate columns return
    /// their constant value.
    pub fn invert_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.check(row.len())?;
        Ok(row
            .iter()
            .zip(&self.mins)
            .zip(&self.maxs)
            .map(|((&v, &lo), &hi)| if hi == lo { lo } else { v * (hi - lo) + lo })
            .collect())
    }
}

pub fn fit_scaler(m: &SeriesMatrix) -> ScalingTransform {
    ScalingTransform::fit(m.view())
}

pub fn apply_scaler(m: &SeriesMatrix, t: &ScalingTransform) -> Result<SeriesMatrix> {
    let values = t.apply_rows(m.view())?;
    Ok(m.with_values(values))
}

pub fn invert_scaler(row: &[f64], t: &ScalingTransform) -> Result<Vec<f64>> {
    t.invert_row(row)
}
