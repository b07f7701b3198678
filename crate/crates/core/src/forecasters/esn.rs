use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

use super::{Forecaster, ModelError, ModelFamily};
use crate::dataset::{RowRange, RowsView};
use crate::linalg::{ridge_regression, spectral_radius, RidgeFit, RidgeRoute};
use crate::rolling_cv::TrainingSet;
use crate::seed;

/// Squarings used when rescaling the recurrent matrix.
const RADIUS_SQUARINGS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsnParams {
    pub reservoir: usize,
    pub spectral_radius: f64,
    /// Leak rate `α` in `(0, 1]`; 1 means no leaking.
    pub leak: f64,
    /// Ridge penalty of the readout.
    pub ridge: f64,
    /// Scale of the uniform input weights.
    pub input_scaling: f64,
}

/// Fixed random weights of an echo state network.
#[derive(Debug, Clone, PartialEq)]
pub struct Reservoir {
    /// `R x (N + 1)`, last column multiplies the constant input.
    pub w_in: DMatrix<f64>,
    /// `R x R`, rescaled to the requested spectral radius.
    pub w: DMatrix<f64>,
    pub leak: f64,
}

impl Reservoir {
    /// Weights uniform in `[-1, 1]`; the recurrent matrix is then rescaled so
    /// its spectral radius equals `params.spectral_radius`.
    pub fn random(params: &EsnParams, inputs: usize, seed: u64) -> Self {
        let r = params.reservoir;
        let mut rng = seed::rng(seed);
        let mut uniform = || rng.random_range(-1.0..=1.0);
        let w_in = DMatrix::from_fn(r, inputs + 1, |_, _| uniform() * params.input_scaling);
        let mut w = DMatrix::from_fn(r, r, |_, _| uniform());
        let current = spectral_radius(&w, RADIUS_SQUARINGS);
        if current > 0.0 {
            w *= params.spectral_radius / current;
        } else {
            w.fill(0.0);
        }
        Self {
            w_in,
            w,
            leak: params.leak,
        }
    }

    pub fn size(&self) -> usize {
        self.w.nrows()
    }

    /// `x ← (1 − α)x + α tanh(W_in [u; 1] + W x)`.
    pub fn step(&self, state: &mut DVector<f64>, input: &[f64]) {
        let n = input.len();
        let mut pre = &self.w * &*state;
        pre += self.w_in.columns(0, n) * DVector::from_column_slice(input);
        pre += self.w_in.column(n);
        let a = self.leak;
        state.zip_apply(&pre, |x, p| *x = (1.0 - a) * *x + a * p.tanh());
    }

    /// State after feeding `rows` from a zero state.
    pub fn run(&self, rows: RowsView<'_>) -> DVector<f64> {
        let mut state = DVector::zeros(self.size());
        for i in 0..rows.rows() {
            self.step(&mut state, rows.row(i));
        }
        state
    }
}

fn features<'a>(state: &'a DVector<f64>, input: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
    state.iter().copied().chain(input.iter().copied())
}

/// Leaky-tanh echo state network with a ridge readout from `[state; input]`
/// (plus an unpenalised intercept) to the next row. The state is reset to zero
/// at the start of every training sequence and of every forecast.
#[derive(Debug, Clone)]
pub struct EchoStateNetwork {
    params: EsnParams,
    seed: u64,
    fitted: Option<(Reservoir, RidgeFit)>,
}

impl EchoStateNetwork {
    pub fn new(params: EsnParams, seed: u64) -> Result<Self, ModelError> {
        let bad = |name: &str, reason: &str| ModelError::InvalidHyper {
            name: name.into(),
            reason: reason.into(),
        };
        if params.reservoir == 0 {
            return Err(bad("reservoir", "need at least one unit"));
        }
        if !(params.leak > 0.0 && params.leak <= 1.0) {
            return Err(bad("leak", "must lie in (0, 1]"));
        }
        if !(params.spectral_radius >= 0.0 && params.spectral_radius.is_finite()) {
            return Err(bad("spectral_radius", "must be a finite value >= 0"));
        }
        Ok(Self {
            params,
            seed,
            fitted: None,
        })
    }

    pub fn reservoir(&self) -> Option<&Reservoir> {
        self.fitted.as_ref().map(|(r, _)| r)
    }
}

impl Forecaster for EchoStateNetwork {
    fn fit(&mut self, data: RowsView<'_>, training: &TrainingSet) -> Result<(), ModelError> {
        let TrainingSet::Sequences(pairs) = training else {
            return Err(ModelError::UnsupportedScheme {
                family: ModelFamily::Esn,
                scheme: "a non-sequence",
            });
        };
        let n = data.cols();
        let reservoir = Reservoir::random(&self.params, n, self.seed);
        let steps: usize = pairs.iter().map(|(input, _)| input.len()).sum();
        if steps == 0 {
            return Err(ModelError::Degenerate("no training steps".into()));
        }
        let width = reservoir.size() + n;
        let mut x = DMatrix::zeros(steps, width);
        let mut y = DMatrix::zeros(steps, n);
        let mut at = 0;
        for (input, target) in pairs {
            if input.len() != target.len() {
                return Err(ModelError::Dimension {
                    what: "target rows",
                    expected: input.len(),
                    found: target.len(),
                });
            }
            let mut state = DVector::zeros(reservoir.size());
            for (u_row, t_row) in (input.start..=input.end).zip(target.start..=target.end) {
                let u = data.row(u_row - 1);
                reservoir.step(&mut state, u);
                for (j, v) in features(&state, u).enumerate() {
                    x[(at, j)] = v;
                }
                for (j, v) in data.row(t_row - 1).iter().enumerate() {
                    y[(at, j)] = *v;
                }
                at += 1;
            }
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("reservoir activations"));
        }
        let readout = ridge_regression(&x, &y, self.params.ridge, RidgeRoute::Auto);
        self.fitted = Some((reservoir, readout));
        Ok(())
    }

    fn predict(&self, data: RowsView<'_>, input: RowRange) -> Result<Vec<f64>, ModelError> {
        let (reservoir, readout) = self.fitted.as_ref().ok_or(ModelError::NotFitted)?;
        if data.cols() + 1 != reservoir.w_in.ncols() {
            return Err(ModelError::Dimension {
                what: "series",
                expected: reservoir.w_in.ncols() - 1,
                found: data.cols(),
            });
        }
        let rows = data.select(input);
        let state = reservoir.run(rows);
        let last = rows.last_row().ok_or_else(|| ModelError::Degenerate("empty warm-up".into()))?;
        let z: Vec<f64> = features(&state, last).collect();
        let out = readout.predict(&z);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("forecast"));
        }
        Ok(out)
    }
}
