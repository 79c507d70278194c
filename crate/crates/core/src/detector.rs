//! Online weighted time-aggregating detector.
//!
//! At time `tau` the statistic is
//!
//! ```text
//! D(tau) = max_{0 <= l < tau} (r_{tau-l} + ... + r_tau) / ((l + 1)^beta * T^(1/2 - beta))
//! ```
//!
//! where `r_t` are the standardized gap estimates. A violation is reported
//! the first time `D(tau) > q`, and stays reported.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Detected,
    NotDetected,
}

impl Decision {
    pub fn is_detected(self) -> bool {
        self == Decision::Detected
    }
}

/// Result of one push.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub tau: usize,
    pub d_value: f64,
    pub decision: Decision,
}

#[derive(Debug, Clone)]
pub struct Detector {
    horizon: usize,
    beta: f64,
    threshold: f64,
    /// `(l + 1)^-beta * T^-(1/2 - beta)` for `l = 0..T`.
    window_weights: Vec<f64>,
    ratios: Vec<f64>,
    first_crossing: Option<usize>,
    running_max: f64,
}

pub fn check_beta(beta: f64) -> Result<()> {
    if (0.0..0.5).contains(&beta) {
        Ok(())
    } else {
        Err(Error::config(format!("beta must lie in [0, 1/2), got {beta}")))
    }
}

impl Detector {
    pub fn new(horizon: usize, beta: f64, threshold: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::config("time horizon T must be at least 1"));
        }
        check_beta(beta)?;
        if threshold.is_nan() {
            return Err(Error::config("threshold is NaN"));
        }
        let scale = (horizon as f64).powf(0.5 - beta);
        let window_weights = (0..horizon)
            .map(|l| 1.0 / (((l + 1) as f64).powf(beta) * scale))
            .collect();
        Ok(Self {
            horizon,
            beta,
            threshold,
            window_weights,
            ratios: Vec::with_capacity(horizon),
            first_crossing: None,
            running_max: f64::NEG_INFINITY,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Current time, i.e. the number of ratios pushed so far.
    pub fn tau(&self) -> usize {
        self.ratios.len()
    }

    pub fn first_crossing(&self) -> Option<usize> {
        self.first_crossing
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    /// Prefix sums `S_0 = 0, S_1, ..., S_tau`.
    pub fn cumsums(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.ratios.len() + 1);
        out.push(0.0);
        let mut acc = 0.0;
        for r in &self.ratios {
            acc += r;
            out.push(acc);
        }
        out
    }

    /// Records the ratio observed at time `tau + 1` and evaluates `D`.
    pub fn push(&mut self, ratio: f64) -> Result<Step> {
        if self.ratios.len() >= self.horizon {
            return Err(Error::contract(format!(
                "detector horizon T = {} already reached",
                self.horizon
            )));
        }
        if ratio.is_nan() {
            return Err(Error::contract("ratio is NaN"));
        }
        self.ratios.push(ratio);
        let tau = self.ratios.len();

        // Window sums accumulated backwards from the newest ratio; this sums
        // each window directly instead of differencing large prefix sums.
        let mut window = 0.0;
        let mut d_value = f64::NEG_INFINITY;
        for (r, w) in self.ratios.iter().rev().zip(&self.window_weights) {
            window += r;
            d_value = d_value.max(window * w);
        }

        self.running_max = self.running_max.max(d_value);
        if self.first_crossing.is_none() && d_value > self.threshold {
            self.first_crossing = Some(tau);
        }
        let decision = if self.first_crossing.is_some() {
            Decision::Detected
        } else {
            Decision::NotDetected
        };
        Ok(Step {
            tau,
            d_value,
            decision,
        })
    }

    /// Largest `D(tau)` seen so far.
    pub fn max_value(&self) -> Result<f64> {
        if self.ratios.is_empty() {
            Err(Error::contract("no observations pushed yet"))
        } else {
            Ok(self.running_max)
        }
    }
}
