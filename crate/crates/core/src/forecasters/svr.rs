use super::lag::LagEmbedding;
use super::ridge::LinearModel;

/// Linear ε-SVR settings. The bias is learned as the weight of a constant
/// feature, so it is regularised like the other weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrOptions {
    pub c: f64,
    pub epsilon: f64,
    /// Stop once the largest KKT violation over a sweep falls below this.
    pub tolerance: f64,
    /// Sweep cap; `None` means `10 * samples * features`.
    pub max_sweeps: Option<usize>,
}

impl SvrOptions {
    pub fn new(c: f64, epsilon: f64) -> Self {
        Self {
            c,
            epsilon,
            tolerance: 1e-6,
            max_sweeps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvrFit {
    pub model: LinearModel,
    /// Dual coefficients `β`, one per sample, each in `[-C, C]`.
    pub dual: Vec<f64>,
    pub sweeps: usize,
    pub max_violation: f64,
}

impl SvrFit {
    pub fn converged(&self, tolerance: f64) -> bool {
        self.max_violation < tolerance
    }
}

/// `x` with a trailing 1 for the bias.
fn augmented_dot(w: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[d]
}

/// Trains by dual coordinate descent, visiting samples in index order.
///
/// The dual is `min ½βᵀQβ − yᵀβ + ε‖β‖₁` subject to `|βᵢ| ≤ C`, where
/// `Q = X̃X̃ᵀ` on the augmented features; `w = Σ βᵢ x̃ᵢ`.
pub fn fit_linear_svr(samples: &LagEmbedding, opts: &SvrOptions) -> SvrFit {
    let (m, d) = (samples.len(), samples.lag);
    let (c, eps) = (opts.c, opts.epsilon);
    let max_sweeps = opts.max_sweeps.unwrap_or(10 * m * d).max(1);
    let q_diag: Vec<f64> = (0..m)
        .map(|i| samples.row(i).iter().map(|v| v * v).sum::<f64>() + 1.0)
        .collect();
    let mut beta = vec![0.0; m];
    let mut w = vec![0.0; d + 1];
    let mut sweeps = 0;
    let mut max_violation = f64::INFINITY;
    while sweeps < max_sweeps {
        sweeps += 1;
        max_violation = 0.0;
        for i in 0..m {
            let x = samples.row(i);
            let g = augmented_dot(&w, x) - samples.targets()[i];
            let b = beta[i];
            max_violation = max_violation.max(violation(b, g, c, eps));
            let qb = q_diag[i] * b;
            let z = if g + eps < qb {
                b - (g + eps) / q_diag[i]
            } else if g - eps > qb {
                b - (g - eps) / q_diag[i]
            } else {
                0.0
            };
            let z = z.clamp(-c, c);
            let delta = z - b;
            if delta != 0.0 {
                beta[i] = z;
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj += delta * xj;
                }
                w[d] += delta;
            }
        }
        if max_violation < opts.tolerance {
            break;
        }
    }
    let bias = w.pop().unwrap_or(0.0);
    SvrFit {
        model: LinearModel { weights: w, bias },
        dual: beta,
        sweeps,
        max_violation,
    }
}

/// Distance of zero from the projected subgradient of coordinate `β` with
/// smooth-part gradient `g`.
fn violation(b: f64, g: f64, c: f64, eps: f64) -> f64 {
    if b == 0.0 {
        (g.abs() - eps).max(0.0)
    } else if b >= c {
        (g + eps).max(0.0)
    } else if b <= -c {
        (-(g - eps)).max(0.0)
    } else if b > 0.0 {
        (g + eps).abs()
    } else {
        (g - eps).abs()
    }
}

/// Primal objective `½‖w̃‖² + C Σ max(0, |w̃·x̃ᵢ − yᵢ| − ε)`.
pub fn primal_objective(samples: &LagEmbedding, model: &LinearModel, c: f64, eps: f64) -> f64 {
    let reg = model.weights.iter().map(|w| w * w).sum::<f64>() + model.bias * model.bias;
    let loss: f64 = (0..samples.len())
        .map(|i| ((model.predict(samples.row(i)) - samples.targets()[i]).abs() - eps).max(0.0))
        .sum();
    0.5 * reg + c * loss
}

/// Dual objective (to be minimised) at `beta`.
pub fn dual_objective(samples: &LagEmbedding, beta: &[f64], eps: f64) -> f64 {
    let d = samples.lag;
    let mut w = vec![0.0; d + 1];
    for (i, b) in beta.iter().enumerate() {
        for (wj, xj) in w.iter_mut().zip(samples.row(i)) {
            *wj += b * xj;
        }
        w[d] += b;
    }
    let quad = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let lin: f64 = beta
        .iter()
        .zip(samples.targets())
        .map(|(b, y)| eps * b.abs() - y * b)
        .sum();
    quad + lin
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RowsView;

    #[test]
    fn tiny_c_shrinks_weights() {
        let series: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).sin()).collect();
        let samples = LagEmbedding::pooled(RowsView::new(&series, 1), 2).unwrap();
        let fit = fit_linear_svr(&samples, &SvrOptions::new(1e-9, 0.0));
        assert!(fit.model.weights.iter().all(|w| w.abs() < 1e-7));
    }

    #[test]
    fn zero_duality_gap_at_convergence() {
        let series: Vec<f64> = (0..30).map(|i| (i as f64 * 0.4).cos() + 0.1 * (i % 3) as f64).collect();
        let samples = LagEmbedding::pooled(RowsView::new(&series, 1), 3).unwrap();
        let opts = SvrOptions::new(0.5, 0.05);
        let fit = fit_linear_svr(&samples, &opts);
        assert!(fit.converged(opts.tolerance));
        let p = primal_objective(&samples, &fit.model, opts.c, opts.epsilon);
        let dual = dual_objective(&samples, &fit.dual, opts.epsilon);
        // primal min equals minus the dual min
        assert!((p + dual).abs() < 1e-5, "gap {}", p + dual);
    }
}
