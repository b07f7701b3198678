//! Seeded synthetic datasets for tests, smoke benchmarks and the fallback
//! traffic fixture.

use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::SeriesMatrix;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    /// Hourly road speeds with rush-hour dips and quieter weekends.
    Traffic,
    RandomWalk,
    /// Independent uniform noise on `[1, 2]`.
    Noise,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub series: usize,
    pub rows: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn generate(&self) -> SeriesMatrix {
        match self.kind {
            SyntheticKind::Traffic => seasonal_traffic(self.series, self.rows, self.seed),
            SyntheticKind::RandomWalk => random_walk(self.series, self.rows, self.seed),
            SyntheticKind::Noise => iid_noise(self.series, self.rows, self.seed),
            SyntheticKind::Constant => constant(self.series, self.rows, 1.0),
        }
    }
}

fn assemble(series: usize, rows: usize, columns: Vec<Vec<f64>>, resolution: &str) -> SeriesMatrix {
    let values = (0..rows).flat_map(|r| columns.iter().map(move |c| c[r])).collect();
    let ids = (1..=series).map(|n| format!("s{n}")).collect();
    SeriesMatrix::from_row_major(values, series, ids)
        .expect("generator emits finite rectangular data")
        .with_resolution(resolution)
}

fn bump(hour: f64, centre: f64, width: f64) -> f64 {
    let d = (hour - centre) / width;
    (-0.5 * d * d).exp()
}

/// Hourly speeds in km/h. Each sensor has its own free-flow speed, rush-hour
/// depth and timing; weekends keep a fifth of the weekday dip. AR(1) noise
/// (φ = 0.7, innovation sd 0.8 km/h) rides on top.
pub fn seasonal_traffic(series: usize, rows: usize, seed: u64) -> SeriesMatrix {
    let columns = (0..series)
        .map(|n| {
            let mut rng = seed::rng(seed::derive(seed, &[n as u64]));
            let free_flow = rng.random_range(35.0..60.0);
            let depth = rng.random_range(0.25..0.5);
            let morning = 8.0 + rng.random_range(-0.75..0.75);
            let evening = 18.0 + rng.random_range(-0.75..0.75);
            let phase = rng.random_range(0.0..2.0 * PI);
            let mut noise = 0.0;
            (0..rows)
                .map(|t| {
                    let hour = (t % 24) as f64;
                    let weekend = (t / 24) % 7 >= 5;
                    let dip = bump(hour, morning, 1.5) + 0.8 * bump(hour, evening, 2.0);
                    let scale = if weekend { 0.2 } else { 1.0 };
                    let night = 0.04 * (2.0 * PI * hour / 24.0 + phase).sin();
                    let z: f64 = rng.sample(StandardNormal);
                    noise = 0.7 * noise + 0.8 * z;
                    free_flow * (1.0 - depth * scale * dip + night) + noise
                })
                .collect()
        })
        .collect();
    assemble(series, rows, columns, "hourly")
}

/// Gaussian random walks started at 10.
pub fn random_walk(series: usize, rows: usize, seed: u64) -> SeriesMatrix {
    let columns = (0..series)
        .map(|n| {
            let mut rng = seed::rng(seed::derive(seed, &[n as u64]));
            let mut y = 10.0;
            (0..rows)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    y += z;
                    y
                })
                .collect()
        })
        .collect();
    assemble(series, rows, columns, "step")
}

pub fn iid_noise(series: usize, rows: usize, seed: u64) -> SeriesMatrix {
    let columns = (0..series)
        .map(|n| {
            let mut rng = seed::rng(seed::derive(seed, &[n as u64]));
            (0..rows).map(|_| rng.random_range(1.0..2.0)).collect()
        })
        .collect();
    assemble(series, rows, columns, "step")
}

pub fn constant(series: usize, rows: usize, value: f64) -> SeriesMatrix {
    assemble(series, rows, vec![vec![value; rows]; series], "step")
}

/// `y[l+1] = phi * y[l]` from `y[0] = start`, one column.
pub fn exact_ar1(rows: usize, phi: f64, start: f64) -> Vec<f64> {
    std::iter::successors(Some(start), |y| Some(phi * y)).take(rows).collect()
}
