//! Per-step normal-approximation auditor with a Bonferroni correction over
//! the horizon. Serves as the comparison baseline for the aggregating
//! detector.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimation::StepStatistic;

/// One-sided interval `(lower, inf)` for the privacy gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub level: f64,
}

impl ConfidenceInterval {
    /// A violation is declared when 0 is outside the interval.
    pub fn signals_violation(&self) -> bool {
        self.lower >= 0.0
    }
}

/// Standard normal quantile function.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p)
}

pub fn naive_interval(step: &StepStatistic, level: f64) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::config(format!("level must lie in (0, 1), got {level}")));
    }
    // avoid 0 * -inf when the variance vanishes
    let lower = if step.sigma_hat == 0.0 {
        step.p_hat
    } else {
        step.p_hat + normal_quantile(level) * step.sigma_hat
    };
    Ok(ConfidenceInterval { lower, level })
}

/// Outcome of the Bonferroni-corrected per-step auditor.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveOutcome {
    /// `-Phi^{-1}(alpha / T)`.
    pub threshold: f64,
    /// Whether step `t` on its own signals a violation.
    pub flags: Vec<bool>,
    /// Absorbing decision: a violation has been signalled at or before `t`.
    pub detected: Vec<bool>,
    pub first_detection: Option<usize>,
}

impl NaiveOutcome {
    pub fn violation(&self) -> bool {
        self.first_detection.is_some()
    }
}

pub fn naive_threshold(alpha: f64, horizon: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if horizon == 0 {
        return Err(Error::config("time horizon T must be at least 1"));
    }
    Ok(-normal_quantile(alpha / horizon as f64))
}

/// Runs the auditor on raw (unstabilized) ratios `p_hat / sigma_hat`.
pub fn naive_monitor(steps: &[StepStatistic], alpha: f64, horizon: usize) -> Result<NaiveOutcome> {
    let threshold = naive_threshold(alpha, horizon)?;
    if steps.len() > horizon {
        return Err(Error::contract(format!(
            "{} steps exceed the horizon T = {horizon}",
            steps.len()
        )));
    }
    let flags: Vec<bool> = steps.iter().map(|s| s.raw_ratio() >= threshold).collect();
    let first_detection = flags.iter().position(|&f| f).map(|i| i + 1);
    let detected = (1..=flags.len())
        .map(|t| first_detection.is_some_and(|f| f <= t))
        .collect();
    Ok(NaiveOutcome {
        threshold,
        flags,
        detected,
        first_detection,
    })
}
