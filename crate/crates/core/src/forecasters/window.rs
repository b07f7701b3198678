use nalgebra::DMatrix;

use super::{Forecaster, ModelError, ModelFamily};
use crate::dataset::{RowRange, RowsView};
use crate::linalg::{ridge_regression, RidgeFit, RidgeRoute};
use crate::rolling_cv::TrainingSet;

/// Ridge map from a flattened `S x N` window to the next row.
#[derive(Debug, Clone)]
pub struct WindowRidge {
    lambda: f64,
    fitted: Option<(RidgeFit, usize, usize)>,
}

impl WindowRidge {
    pub fn new(lambda: f64) -> Self {
        Self { lambda, fitted: None }
    }

    /// `(S, N)` of the fitted model.
    pub fn shape(&self) -> Option<(usize, usize)> {
        self.fitted.as_ref().map(|(_, s, n)| (*s, *n))
    }
}

impl Forecaster for WindowRidge {
    fn fit(&mut self, data: RowsView<'_>, training: &TrainingSet) -> Result<(), ModelError> {
        let TrainingSet::Stack(pairs) = training else {
            return Err(ModelError::UnsupportedScheme {
                family: ModelFamily::WindowRidge,
                scheme: "a non-window",
            });
        };
        if pairs.is_empty() {
            return Err(ModelError::Degenerate("empty training stack".into()));
        }
        let (s, n) = (pairs[0].0.len(), data.cols());
        let mut x = DMatrix::zeros(pairs.len(), s * n);
        let mut y = DMatrix::zeros(pairs.len(), n);
        for (i, (window, target)) in pairs.iter().enumerate() {
            if window.len() != s {
                return Err(ModelError::Dimension {
                    what: "window rows",
                    expected: s,
                    found: window.len(),
                });
            }
            for (j, v) in data.select(*window).data().iter().enumerate() {
                x[(i, j)] = *v;
            }
            for (j, v) in data.row(target - 1).iter().enumerate() {
                y[(i, j)] = *v;
            }
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("training rows"));
        }
        self.fitted = Some((ridge_regression(&x, &y, self.lambda, RidgeRoute::Auto), s, n));
        Ok(())
    }

    fn predict(&self, data: RowsView<'_>, input: RowRange) -> Result<Vec<f64>, ModelError> {
        let (fit, s, n) = self.fitted.as_ref().ok_or(ModelError::NotFitted)?;
        if input.len() != *s {
            return Err(ModelError::Dimension {
                what: "window rows",
                expected: *s,
                found: input.len(),
            });
        }
        if data.cols() != *n {
            return Err(ModelError::Dimension {
                what: "series",
                expected: *n,
                found: data.cols(),
            });
        }
        Ok(fit.predict(data.select(input).data()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rolling_cv::{plan_multidim_window, SplitConfig};

    #[test]
    fn huge_penalty_predicts_mean_target_row() {
        let data: Vec<f64> = (0..20).map(|i| ((i * 5) % 7) as f64).collect();
        let view = RowsView::new(&data, 2);
        let plan = plan_multidim_window(SplitConfig::new(10, 8, Some(2))).unwrap();
        let fold = &plan.folds[0];
        let mut m = WindowRidge::new(1e15);
        m.fit(view, &fold.training).unwrap();
        let TrainingSet::Stack(pairs) = &fold.training else { unreachable!() };
        let mut mean = [0.0; 2];
        for (_, t) in pairs {
            for (j, v) in view.row(t - 1).iter().enumerate() {
                mean[j] += v / pairs.len() as f64;
            }
        }
        let got = m.predict(view, fold.input).unwrap();
        assert!((got[0] - mean[0]).abs() < 1e-6 && (got[1] - mean[1]).abs() < 1e-6);
        assert_eq!(m.shape(), Some((2, 2)));
        assert!(m.predict(view, RowRange::new(1, 3)).is_err());
    }
}
