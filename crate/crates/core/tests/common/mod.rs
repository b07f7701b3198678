//! Independent oracles shared by the integration tests and the acceptance
//! runner. Nothing here calls into the crate's metric or solver code.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use mtsforecast::forecasters::LagEmbedding;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// Direct summation over the textbook definitions, one series at a time.

pub fn oracle_smape(y: &[f64], f: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..y.len() {
        let d = y[i].abs() + f[i].abs();
        if d > 0.0 {
            s += 2.0 * (y[i] - f[i]).abs() / d;
        }
    }
    s / y.len() as f64
}

pub fn oracle_maape(y: &[f64], f: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..y.len() {
        s += if y[i] != 0.0 {
            (((y[i] - f[i]) / y[i]).abs()).atan()
        } else if f[i] == 0.0 {
            0.0
        } else {
            FRAC_PI_2
        };
    }
    s / y.len() as f64
}

pub fn oracle_mase(y: &[f64], f: &[f64], history: &[Vec<f64>]) -> Option<f64> {
    let mut s = 0.0;
    let mut k = 0;
    for n in 0..y.len() {
        let mut d = 0.0;
        for l in 1..history.len() {
            d += (history[l][n] - history[l - 1][n]).abs();
        }
        d /= (history.len() - 1) as f64;
        let e = (y[n] - f[n]).abs();
        if d == 0.0 {
            if e == 0.0 {
                k += 1;
            }
        } else {
            s += e / d;
            k += 1;
        }
    }
    if k == 0 {
        None
    } else {
        Some(s / k as f64)
    }
}

pub fn draw(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..10) {
        0 => 0.0,
        1 => -rng.random_range(0.0..5.0),
        2 => rng.random_range(0.0..1e-3),
        _ => rng.random_range(0.0..10.0),
    }
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

/// Minimises the SVR dual over `β = a⁺ − a⁻`, `a± ∈ [0, C]`, by accelerated
/// projected gradient on the smooth split form.
pub fn qp_oracle(samples: &LagEmbedding, c: f64, eps: f64) -> f64 {
    let m = samples.len();
    let d = samples.lag;
    let mut xt = DMatrix::zeros(m, d + 1);
    for i in 0..m {
        for j in 0..d {
            xt[(i, j)] = samples.row(i)[j];
        }
        xt[(i, d)] = 1.0;
    }
    let q = &xt * xt.transpose();
    let y = DVector::from_column_slice(samples.targets());
    let lip = 2.0 * q.symmetric_eigenvalues().amax() + 1e-12;
    let step = 1.0 / lip;
    let project = |v: f64| v.clamp(0.0, c);
    let objective = |p: &DVector<f64>, n: &DVector<f64>| {
        let b = p - n;
        0.5 * b.dot(&(&q * &b)) - y.dot(&b) + eps * (p.sum() + n.sum())
    };
    let (mut p, mut n) = (DVector::zeros(m), DVector::zeros(m));
    let (mut zp, mut zn) = (p.clone(), n.clone());
    let mut t = 1.0f64;
    for _ in 0..200_000 {
        let g = &q * (&zp - &zn) - &y;
        let np = (&zp - g.add_scalar(eps) * step).map(project);
        let nn = (&zn - (-&g).add_scalar(eps) * step).map(project);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let mom = (t - 1.0) / t_next;
        zp = &np + (&np - &p) * mom;
        zn = &nn + (&nn - &n) * mom;
        p = np;
        n = nn;
        t = t_next;
    }
    objective(&p, &n)
}
