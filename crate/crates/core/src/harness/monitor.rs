//! Running the detector over one replication of a scenario.

use crate::detector::Detector;
use crate::error::{Error, Result};
use crate::estimation::{measure_step, AuditTuple, DEFAULT_C_STAB};
use crate::harness::scenario::{Schedule, ScenarioSpec};
use crate::rng::{stream, StreamRng};

/// Parameters shared by every replication of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorConfig {
    /// Batch size per input and time point.
    pub n: usize,
    pub horizon: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Threshold `q(alpha)` for the detector.
    pub q: f64,
    pub c_stab: f64,
}

impl MonitorConfig {
    pub fn new(n: usize, horizon: usize, alpha: f64, beta: f64, q: f64) -> Self {
        Self {
            n,
            horizon,
            alpha,
            beta,
            q,
            c_stab: DEFAULT_C_STAB,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("sample size n must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        // horizon and beta are checked by the detector
        Detector::new(self.horizon, self.beta, self.q).map(|_| ())
    }
}

/// One replication of a monitored scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub scenario: String,
    pub rep: usize,
    pub seed: u64,
    pub change_time: usize,
    /// `D(tau)` for `tau = 1..=T`.
    pub d_values: Vec<f64>,
    pub first_detection: Option<usize>,
}

impl RunRecord {
    /// Steps from the modification to its detection.
    pub fn delay(&self) -> Option<usize> {
        self.first_detection
            .filter(|&f| f >= self.change_time)
            .map(|f| f - self.change_time)
    }

    /// Whether a violation had been reported by time `tau`.
    pub fn detected_by(&self, tau: usize) -> bool {
        self.first_detection.is_some_and(|f| f <= tau)
    }
}

/// Trace of a single monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub d_values: Vec<f64>,
    pub first_detection: Option<usize>,
}

/// Monitors `tuple` over `schedule` for `t = 1..=T`, drawing all batches
/// from `rng`.
pub fn monitor_schedule(
    schedule: &Schedule,
    tuple: &AuditTuple,
    cfg: &MonitorConfig,
    rng: &mut StreamRng,
) -> Result<Trace> {
    let mut detector = Detector::new(cfg.horizon, cfg.beta, cfg.q)?;
    let mut d_values = Vec::with_capacity(cfg.horizon);
    for t in 1..=cfg.horizon {
        let step = measure_step(schedule.at(t), tuple, cfg.n, cfg.c_stab, rng)?;
        d_values.push(detector.push(step.ratio)?.d_value);
    }
    Ok(Trace {
        d_values,
        first_detection: detector.first_crossing(),
    })
}

/// Replication `rep` of `scenario`, using the stream derived from `(seed, rep)`.
pub fn run_monitor(scenario: &ScenarioSpec, cfg: &MonitorConfig, seed: u64, rep: usize) -> Result<RunRecord> {
    cfg.validate()?;
    scenario.validate(cfg.horizon)?;
    let schedule = scenario.schedule()?;
    let mut rng = stream(seed, &[rep as u64]);
    let trace = monitor_schedule(&schedule, &scenario.tuple, cfg, &mut rng)?;
    Ok(RunRecord {
        scenario: scenario.id.clone(),
        rep,
        seed,
        change_time: scenario.change_time,
        d_values: trace.d_values,
        first_detection: trace.first_detection,
    })
}
