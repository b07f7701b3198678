use super::{Forecaster, ModelError};
use crate::dataset::{RowRange, RowsView};
use crate::rolling_cv::TrainingSet;

/// Last row of `history`.
pub fn naive_last(history: RowsView<'_>) -> Result<Vec<f64>, ModelError> {
    history
        .last_row()
        .map(<[f64]>::to_vec)
        .ok_or_else(|| ModelError::Degenerate("empty history".into()))
}

/// Repeats the last observed row. Needs no training.
#[derive(Debug, Clone, Copy, Default)]
pub struct NaiveLast;

impl Forecaster for NaiveLast {
    fn fit(&mut self, _data: RowsView<'_>, _training: &TrainingSet) -> Result<(), ModelError> {
        Ok(())
    }

    fn predict(&self, data: RowsView<'_>, input: RowRange) -> Result<Vec<f64>, ModelError> {
        naive_last(data.select(input))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn returns_last_row() {
        let data = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(naive_last(RowsView::new(&data, 2)).unwrap(), vec![3.0, 4.0]);
        assert_eq!(naive_last(RowsView::new(&[7.0], 1)).unwrap(), vec![7.0]);
        assert!(naive_last(RowsView::new(&[], 3)).is_err());
    }

    #[test]
    fn predicts_from_input_range_only() {
        let data = [1.0, 2.0, 3.0, 4.0, 5.0];
        let got = NaiveLast.predict(RowsView::new(&data, 1), RowRange::new(1, 3)).unwrap();
        assert_eq!(got, vec![3.0]);
    }
}
