//! Sample-size sweeps and the detection-delay rate in `n`.

use crate::error::{Error, Result};
use crate::harness::experiment::{run_experiment, ScenarioResult};
use crate::harness::monitor::MonitorConfig;
use crate::harness::scenario::ScenarioSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub n: usize,
    pub result: ScenarioResult,
}

/// Runs the same experiment for every batch size in `n_list`.
pub fn sweep_n(
    scenario: &ScenarioSpec,
    n_list: &[usize],
    reps: usize,
    base: &MonitorConfig,
    seed: u64,
) -> Result<Vec<SweepEntry>> {
    if n_list.is_empty() {
        return Err(Error::config("n list is empty"));
    }
    n_list
        .iter()
        .map(|&n| {
            let cfg = MonitorConfig { n, ..*base };
            Ok(SweepEntry {
                n,
                result: run_experiment(scenario, reps, &cfg, seed)?,
            })
        })
        .collect()
}

/// Exponent of `n` in the delay rate, `1 / (2 (1 - beta))`.
pub fn delay_exponent(beta: f64) -> f64 {
    1.0 / (2.0 * (1.0 - beta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub n: usize,
    pub mean_delay: f64,
    /// `mean_delay * n^(1 / (2 (1 - beta)))`; roughly constant when the
    /// rate is attained.
    pub scaled_delay: f64,
}

/// Rescales mean delays by the predicted rate in `n`, sorted by `n`.
pub fn delay_rate_check(delays: &[(usize, f64)], beta: f64) -> Result<Vec<RateRow>> {
    if delays.len() < 2 {
        return Err(Error::config("delay rate check needs at least two sample sizes"));
    }
    let exponent = delay_exponent(beta);
    let mut rows: Vec<RateRow> = delays
        .iter()
        .map(|&(n, mean_delay)| RateRow {
            n,
            mean_delay,
            scaled_delay: mean_delay * (n as f64).powf(exponent),
        })
        .collect();
    rows.sort_by_key(|r| r.n);
    Ok(rows)
}
