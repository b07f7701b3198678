//! Dense linear-algebra helpers shared by the linear models and the ESN.

use nalgebra::{DMatrix, DVector};

/// Solves `(A + λI) X = B` for a symmetric positive semi-definite `A`.
///
/// Uses a Cholesky factorisation when `λ > 0`. With `λ = 0`, or if the
/// factorisation fails, falls back to the SVD pseudo-inverse, which yields
/// the minimum-norm solution for singular systems.
pub fn solve_regularized(mut a: DMatrix<f64>, b: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    for i in 0..a.nrows() {
        a[(i, i)] += lambda;
    }
    if lambda > 0.0 {
        if let Some(chol) = a.clone().cholesky() {
            let x = chol.solve(b);
            if x.iter().all(|v| v.is_finite()) {
                return x;
            }
        }
    }
    pseudo_solve(a, b)
}

fn pseudo_solve(a: DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = a.nrows().max(a.ncols()).max(1) as f64;
    let svd = a.svd(true, true);
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = largest * dim * f64::EPSILON;
    svd.solve(b, eps).expect("both factors were requested")
}

/// Linear map with an unpenalised intercept: `ŷ = Wᵀx + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeFit {
    /// `d x k` coefficients.
    pub weights: DMatrix<f64>,
    /// `k` intercepts.
    pub intercept: DVector<f64>,
}

impl RidgeFit {
    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        let xv = DVector::from_column_slice(x);
        (self.weights.tr_mul(&xv) + &self.intercept).iter().copied().collect()
    }
}

/// Which normal equations to solve for a ridge fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RidgeRoute {
    /// `(XᵀX + λI) W = XᵀY`, cheap when features <= samples.
    Primal,
    /// `W = Xᵀ (XXᵀ + λI)⁻¹ Y`, cheap when features > samples.
    Dual,
    Auto,
}

/// Column means of `x` and the centred copy.
pub fn center(x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let m = x.nrows().max(1) as f64;
    let means = DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / m));
    let mut centered = x.clone();
    for (mut col, mean) in centered.column_iter_mut().zip(means.iter()) {
        col.add_scalar_mut(-mean);
    }
    (means, centered)
}

/// Multi-output ridge regression of `y` (`m x k`) on `x` (`m x d`) with an
/// unpenalised intercept, obtained by centring both sides.
pub fn ridge_regression(x: &DMatrix<f64>, y: &DMatrix<f64>, lambda: f64, route: RidgeRoute) -> RidgeFit {
    assert_eq!(x.nrows(), y.nrows(), "sample count");
    let (x_mean, xc) = center(x);
    let (y_mean, yc) = center(y);
    let route = match route {
        RidgeRoute::Auto if x.ncols() > x.nrows() => RidgeRoute::Dual,
        RidgeRoute::Auto => RidgeRoute::Primal,
        r => r,
    };
    let weights = match route {
        RidgeRoute::Dual => {
            let kernel = &xc * xc.transpose();
            let alpha = solve_regularized(kernel, &yc, lambda);
            xc.tr_mul(&alpha)
        }
        _ => solve_regularized(xc.tr_mul(&xc), &xc.tr_mul(&yc), lambda),
    };
    let intercept = y_mean - weights.tr_mul(&x_mean);
    RidgeFit { weights, intercept }
}

/// Spectral radius by repeated squaring: `‖W^(2^k)‖^(1/2^k)` converges to the
/// largest eigenvalue modulus for any square matrix, including ones whose
/// dominant eigenvalues form a complex pair. The matrix is renormalised after
/// every squaring and the log-scale accumulated, so 50 squarings are safe.
pub fn spectral_radius(w: &DMatrix<f64>, squarings: usize) -> f64 {
    assert!(w.is_square(), "spectral radius of a non-square matrix");
    let norm = w.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let mut m = w / norm;
    // log of ‖W^(2^k)‖ divided by 2^k
    let mut log_rate = norm.ln();
    let mut weight = 1.0;
    for _ in 0..squarings {
        m = &m * &m;
        let n = m.norm();
        if n == 0.0 || !n.is_finite() {
            return 0.0;
        }
        m /= n;
        weight *= 0.5;
        log_rate += n.ln() * weight;
    }
    log_rate.exp()
}
