use rand::seq::index::sample;

use super::{HarnessError, WindowSampling};
use crate::seed;

/// `runs` distinct 1-based start rows for windows of `window + 1` rows
/// (history plus one test row) inside a dataset of `total` rows.
///
/// Even sampling spaces the starts over `1..=total-window` with
/// `start_i = 1 + round(i (max - 1) / (runs - 1))`; a single run starts at 1.
pub fn sample_windows(
    total: usize,
    window: usize,
    runs: usize,
    mode: WindowSampling,
    seed: u64,
) -> Result<Vec<usize>, HarnessError> {
    if runs == 0 {
        return Err(HarnessError::Window("at least one run is required".into()));
    }
    if window == 0 || window + 1 > total {
        return Err(HarnessError::Window(format!(
            "window of {window} rows plus a test row does not fit in {total} rows"
        )));
    }
    let max = total - window;
    if runs > max {
        return Err(HarnessError::Window(format!(
            "{runs} runs requested but only {max} distinct window starts exist"
        )));
    }
    if runs == 1 {
        return Ok(vec![1]);
    }
    Ok(match mode {
        WindowSampling::Even => {
            let step = (max - 1) as f64 / (runs - 1) as f64;
            (0..runs).map(|i| 1 + (i as f64 * step).round() as usize).collect()
        }
        WindowSampling::Random => {
            let mut rng = seed::rng(seed);
            let mut starts: Vec<usize> = sample(&mut rng, max, runs).into_iter().map(|s| s + 1).collect();
            starts.sort_unstable();
            starts
        }
    })
}
