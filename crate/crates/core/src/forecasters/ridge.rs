use nalgebra::DMatrix;

use super::lag::LagEmbedding;
use crate::linalg::{ridge_regression, RidgeRoute};

/// `ŷ = w·x + b` over lag features.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

/// Ridge regression on lag samples with an unpenalised intercept. With
/// `lambda = 0` and a singular design the minimum-norm solution is used.
pub fn fit_ridge(samples: &LagEmbedding, lambda: f64) -> LinearModel {
    let x = DMatrix::from_row_slice(samples.len(), samples.lag, samples.features());
    let y = DMatrix::from_column_slice(samples.len(), 1, samples.targets());
    let fit = ridge_regression(&x, &y, lambda, RidgeRoute::Primal);
    LinearModel {
        weights: fit.weights.column(0).iter().copied().collect(),
        bias: fit.intercept[0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RowsView;

    #[test]
    fn recovers_exact_ar1() {
        let series: Vec<f64> = std::iter::successors(Some(1.0), |y| Some(0.5 * y)).take(12).collect();
        let samples = LagEmbedding::pooled(RowsView::new(&series, 1), 1).unwrap();
        let m = fit_ridge(&samples, 0.0);
        assert!((m.weights[0] - 0.5).abs() < 1e-8);
        assert!(m.bias.abs() < 1e-8);
    }

    #[test]
    fn constant_series_predicts_constant() {
        let series = [3.0; 10];
        let samples = LagEmbedding::pooled(RowsView::new(&series, 1), 2).unwrap();
        let m = fit_ridge(&samples, 0.0);
        assert!((m.predict(&[3.0, 3.0]) - 3.0).abs() < 1e-12);
    }
}
