//! Replication driver and detection-curve statistics.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::monitor::{run_monitor, MonitorConfig, RunRecord};
use crate::harness::scenario::ScenarioSpec;

/// Aggregate of all replications of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub scenario: String,
    pub change_time: usize,
    pub harmful: bool,
    /// Fraction of replications that detected by `tau`, for `tau = 1..=T`.
    pub detection_curve: Vec<f64>,
    /// Mean delay among replications that detected at or after the change.
    pub mean_delay: Option<f64>,
    pub median_delay: Option<f64>,
    /// Fraction of replications with a false alarm: a detection before the
    /// change for harmful scenarios, any detection for harmless ones.
    pub false_alarm_frac: f64,
    pub records: Vec<RunRecord>,
}

impl ScenarioResult {
    /// Fraction of replications that detected strictly before the change.
    pub fn pre_change_alarm_frac(&self) -> f64 {
        if self.change_time <= 1 {
            return 0.0;
        }
        self.detection_curve[self.change_time - 2]
    }

    /// Detection fraction at the end of the horizon.
    pub fn final_detection(&self) -> f64 {
        *self.detection_curve.last().expect("non-empty horizon")
    }
}

/// Fraction of `records` that had detected by each `tau = 1..=horizon`.
pub fn detection_curve(records: &[RunRecord], horizon: usize) -> Vec<f64> {
    let firsts: Vec<Option<usize>> = records.iter().map(|r| r.first_detection).collect();
    detection_curve_from(&firsts, horizon)
}

/// Same as [`detection_curve`], from first-detection times directly.
pub fn detection_curve_from(first_detections: &[Option<usize>], horizon: usize) -> Vec<f64> {
    let reps = first_detections.len() as f64;
    let mut counts = vec![0usize; horizon + 1];
    for f in first_detections.iter().flatten() {
        counts[*f] += 1;
    }
    let mut running = 0usize;
    counts[1..]
        .iter()
        .map(|c| {
            running += c;
            running as f64 / reps
        })
        .collect()
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

pub fn summarize(scenario: &ScenarioSpec, horizon: usize, records: Vec<RunRecord>) -> ScenarioResult {
    let delays: Vec<f64> = records.iter().filter_map(|r| r.delay()).map(|d| d as f64).collect();
    let alarms = records
        .iter()
        .filter(|r| match r.first_detection {
            Some(f) => !scenario.harmful || f < scenario.change_time,
            None => false,
        })
        .count();
    ScenarioResult {
        scenario: scenario.id.clone(),
        change_time: scenario.change_time,
        harmful: scenario.harmful,
        detection_curve: detection_curve(&records, horizon),
        mean_delay: mean(&delays),
        median_delay: median(&delays),
        false_alarm_frac: alarms as f64 / records.len() as f64,
        records,
    }
}

/// Runs `reps` replications; replication `r` uses the stream derived from
/// `(seed, r)`. Replications run in parallel and are returned in order.
pub fn run_experiment(scenario: &ScenarioSpec, reps: usize, cfg: &MonitorConfig, seed: u64) -> Result<ScenarioResult> {
    if reps == 0 {
        return Err(Error::config("reps must be at least 1"));
    }
    cfg.validate()?;
    scenario.validate(cfg.horizon)?;
    let records = (0..reps)
        .into_par_iter()
        .map(|rep| run_monitor(scenario, cfg, seed, rep))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(scenario, cfg.horizon, records))
}
