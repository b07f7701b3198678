//! Accuracy metrics for one forecast row of `N` series.
//!
//! Each metric averages a per-series term over the `N` series:
//!
//! * sMAPE: `2|y - ŷ| / (|y| + |ŷ|)`, in `[0, 2]`.
//! * MAAPE: `arctan |(y - ŷ) / y|`, in `[0, π/2]`.
//! * MASE: `|y - ŷ| / d`, where `d` is the mean absolute one-step change of
//!   the series over the history window (the in-sample naive forecast error).
//!
//! Zero-denominator conventions: an sMAPE term with `y = ŷ = 0` is 0; a MAAPE
//! term with `y = 0` is `π/2` unless `ŷ = 0` too; a MASE term with `d = 0` is
//! 0 when the forecast is exact and the series is skipped otherwise. MASE is
//! `None` when every series is skipped.

use serde::{Deserialize, Serialize};

use crate::dataset::RowsView;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("actual has {actual} values, predicted has {predicted}")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("forecast rows must contain at least one series")]
    Empty,
    #[error("MASE needs at least 2 history rows, got {0}")]
    ShortHistory(usize),
    #[error("MASE history has {history} columns, forecast has {forecast}")]
    ColumnMismatch { history: usize, forecast: usize },
}

/// Actual and predicted values of the next observation row.
#[derive(Debug, Clone, Copy)]
pub struct ForecastPair<'a> {
    actual: &'a [f64],
    predicted: &'a [f64],
}

impl<'a> ForecastPair<'a> {
    pub fn new(actual: &'a [f64], predicted: &'a [f64]) -> Result<Self, MetricError> {
        if actual.len() != predicted.len() {
            return Err(MetricError::LengthMismatch {
                actual: actual.len(),
                predicted: predicted.len(),
            });
        }
        if actual.is_empty() {
            return Err(MetricError::Empty);
        }
        Ok(Self { actual, predicted })
    }

    pub fn actual(&self) -> &'a [f64] {
        self.actual
    }

    pub fn predicted(&self) -> &'a [f64] {
        self.predicted
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64)> + 'a {
        self.actual.iter().copied().zip(self.predicted.iter().copied())
    }
}

/// History window whose one-step changes scale the MASE terms.
#[derive(Debug, Clone, Copy)]
pub struct MaseContext<'a> {
    history: RowsView<'a>,
}

impl<'a> MaseContext<'a> {
    pub fn new(history: RowsView<'a>) -> Result<Self, MetricError> {
        if history.rows() < 2 {
            return Err(MetricError::ShortHistory(history.rows()));
        }
        Ok(Self { history })
    }

    /// Mean absolute one-step change of series `col`.
    pub fn naive_scale(&self, col: usize) -> f64 {
        let rows = self.history.rows();
        let total: f64 = (1..rows)
            .map(|l| (self.history.get(l, col) - self.history.get(l - 1, col)).abs())
            .sum();
        total / (rows - 1) as f64
    }
}

pub fn smape(p: &ForecastPair<'_>) -> f64 {
    let total: f64 = p
        .terms()
        .map(|(y, yhat)| {
            let denom = y.abs() + yhat.abs();
            if denom == 0.0 {
                0.0
            } else {
                2.0 * (y - yhat).abs() / denom
            }
        })
        .sum();
    total / p.len() as f64
}

pub fn maape(p: &ForecastPair<'_>) -> f64 {
    let total: f64 = p
        .terms()
        .map(|(y, yhat)| {
            if y == 0.0 {
                if yhat == 0.0 {
                    0.0
                } else {
                    std::f64::consts::FRAC_PI_2
                }
            } else {
                ((y - yhat) / y).abs().atan()
            }
        })
        .sum();
    total / p.len() as f64
}

/// MASE of the pair against the naive scale of `ctx`. `Ok(None)` means every
/// series had a flat history and a non-zero error, so the metric is undefined.
pub fn mase(p: &ForecastPair<'_>, ctx: &MaseContext<'_>) -> Result<Option<f64>, MetricError> {
    if ctx.history.cols() != p.len() {
        return Err(MetricError::ColumnMismatch {
            history: ctx.history.cols(),
            forecast: p.len(),
        });
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    for (n, (y, yhat)) in p.terms().enumerate() {
        let err = (y - yhat).abs();
        let scale = ctx.naive_scale(n);
        if scale == 0.0 {
            if err == 0.0 {
                counted += 1;
            }
            continue;
        }
        total += err / scale;
        counted += 1;
    }
    Ok((counted > 0).then(|| total / counted as f64))
}

/// The objective minimised during rolling-window tuning (sMAPE).
pub fn cv_objective(p: &ForecastPair<'_>) -> f64 {
    smape(p)
}

/// All three metrics for one forecast row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTriple {
    pub smape: f64,
    pub maape: f64,
    pub mase: Option<f64>,
}

pub fn evaluate(actual: &[f64], predicted: &[f64], history: RowsView<'_>) -> Result<MetricTriple, MetricError> {
    let pair = ForecastPair::new(actual, predicted)?;
    let ctx = MaseContext::new(history)?;
    Ok(MetricTriple {
        smape: smape(&pair),
        maape: maape(&pair),
        mase: mase(&pair, &ctx)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn pair<'a>(a: &'a [f64], p: &'a [f64]) -> ForecastPair<'a> {
        ForecastPair::new(a, p).unwrap()
    }

    #[test]
    fn smape_examples() {
        assert_eq!(smape(&pair(&[1.0], &[1.0])), 0.0);
        assert!((smape(&pair(&[2.0], &[1.0])) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(smape(&pair(&[1.0, 0.0], &[0.0, 0.0])), 1.0);
    }

    #[test]
    fn maape_examples() {
        assert_eq!(maape(&pair(&[3.0, -2.0], &[3.0, -2.0])), 0.0);
        assert!((maape(&pair(&[1.0], &[0.0])) - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(maape(&pair(&[0.0], &[5.0])), FRAC_PI_2);
        assert_eq!(maape(&pair(&[0.0], &[0.0])), 0.0);
    }

    #[test]
    fn mase_examples() {
        let h = [1.0, 2.0, 2.0, 2.0, 3.0, 2.0];
        let history = RowsView::new(&h, 2);
        let ctx = MaseContext::new(history).unwrap();
        assert_eq!(mase(&pair(&[4.0, 2.0], &[4.0, 2.0]), &ctx).unwrap(), Some(0.0));

        let single = [1.0, 2.0, 3.0];
        let ctx1 = MaseContext::new(RowsView::new(&single, 1)).unwrap();
        assert_eq!(mase(&pair(&[4.0], &[3.0]), &ctx1).unwrap(), Some(1.0));

        // second series is flat with a 0.5 miss, so only the first counts
        assert_eq!(mase(&pair(&[4.0, 2.0], &[3.75, 2.5]), &ctx).unwrap(), Some(0.25));
    }

    #[test]
    fn mase_undefined_and_errors() {
        let flat = [5.0, 5.0, 5.0];
        let ctx = MaseContext::new(RowsView::new(&flat, 1)).unwrap();
        assert_eq!(mase(&pair(&[5.0], &[6.0]), &ctx).unwrap(), None);
        assert!(matches!(
            MaseContext::new(RowsView::new(&[1.0], 1)),
            Err(MetricError::ShortHistory(1))
        ));
        assert!(mase(&pair(&[1.0, 2.0], &[1.0, 2.0]), &ctx).is_err());
        assert!(ForecastPair::new(&[1.0], &[1.0, 2.0]).is_err());
        assert!(ForecastPair::new(&[], &[]).is_err());
    }

    #[test]
    fn cv_objective_is_smape() {
        let p = pair(&[0.3, -1.7, 2.2], &[0.1, -1.0, 2.9]);
        assert_eq!(cv_objective(&p).to_bits(), smape(&p).to_bits());
        assert_eq!(cv_objective(&pair(&[1.0], &[1.0])), 0.0);
    }
}
