//! Per-time-point estimation of the privacy gap
//! `p = P(A(x) ∈ E) - e^ε P(A(x') ∈ E)` and its standardized ratio.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanisms::{event_contains, sample_hits, Event, MechanismSpec, Output};

/// Stabilization floor applied to the estimated standard deviation.
pub const DEFAULT_C_STAB: f64 = 1e-6;

/// Two neighboring inputs, the event that witnesses a violation, and the
/// privacy level being audited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditTuple {
    pub x: Vec<f64>,
    pub x_prime: Vec<f64>,
    pub event: Event,
    pub epsilon: f64,
}

impl AuditTuple {
    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.x_prime.len() {
            return Err(Error::config(format!(
                "neighboring inputs differ in length ({} vs {})",
                self.x.len(),
                self.x_prime.len()
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        self.event.validate()
    }

    /// Checks the tuple against a mechanism that will be sampled with it.
    pub fn check_against(&self, spec: &MechanismSpec) -> Result<()> {
        spec.validate()?;
        spec.validate_input(&self.x)?;
        spec.validate_input(&self.x_prime)?;
        spec.check_event(&self.event)
    }
}

/// Everything computed from one pair of batches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStatistic {
    pub n: u64,
    pub n_x: u64,
    pub n_y: u64,
    pub p_hat: f64,
    pub sigma_hat: f64,
    pub sigma_stab: f64,
    /// `p_hat / sigma_stab`, with `0/0 = 0`.
    pub ratio: f64,
}

impl StepStatistic {
    /// `p_hat / sigma_hat` without stabilization: `0/0 = 0`, and `±inf` when
    /// only the variance vanishes.
    pub fn raw_ratio(&self) -> f64 {
        if self.sigma_hat > 0.0 {
            self.p_hat / self.sigma_hat
        } else if self.p_hat == 0.0 {
            0.0
        } else {
            self.p_hat.signum() * f64::INFINITY
        }
    }
}

pub fn count_hits(outputs: &[Output], event: &Event) -> Result<u64> {
    let mut hits = 0;
    for out in outputs {
        if event_contains(event, out)? {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Builds the step statistic from hit counts.
///
/// With `c_stab > 0` the ratio is always finite. With `c_stab = 0` a
/// degenerate batch (zero variance, nonzero gap) yields an infinite ratio.
pub fn estimate_step(n: u64, n_x: u64, n_y: u64, epsilon: f64, c_stab: f64) -> Result<StepStatistic> {
    if n == 0 {
        return Err(Error::contract("batch size must be at least 1"));
    }
    if n_x > n || n_y > n {
        return Err(Error::contract(format!(
            "hit counts ({n_x}, {n_y}) exceed batch size {n}"
        )));
    }
    if c_stab.is_nan() || c_stab < 0.0 {
        return Err(Error::contract(format!("c_stab must be non-negative, got {c_stab}")));
    }
    let nf = n as f64;
    let (fx, fy) = (n_x as f64, n_y as f64);
    let e = epsilon.exp();
    let p_hat = (fx - e * fy) / nf;
    let var = fx / (nf * nf) * (1.0 - fx / nf) + e * e * fy / (nf * nf) * (1.0 - fy / nf);
    let sigma_hat = var.sqrt();
    let sigma_stab = sigma_hat.max(c_stab);
    let ratio = if p_hat == 0.0 && sigma_hat == 0.0 {
        0.0
    } else if sigma_stab == 0.0 {
        p_hat.signum() * f64::INFINITY
    } else {
        p_hat / sigma_stab
    };
    Ok(StepStatistic {
        n,
        n_x,
        n_y,
        p_hat,
        sigma_hat,
        sigma_stab,
        ratio,
    })
}

/// The population gap for known event probabilities.
pub fn true_gap(p_x: f64, p_y: f64, epsilon: f64) -> f64 {
    p_x - epsilon.exp() * p_y
}

/// Samples one batch per input of `tuple` (x first, then x') from the same
/// generator and returns the step statistic.
pub fn measure_step<R: Rng + ?Sized>(
    spec: &MechanismSpec,
    tuple: &AuditTuple,
    n: usize,
    c_stab: f64,
    rng: &mut R,
) -> Result<StepStatistic> {
    let n_x = sample_hits(spec, &tuple.x, &tuple.event, n, rng)?;
    let n_y = sample_hits(spec, &tuple.x_prime, &tuple.event, n, rng)?;
    estimate_step(n as u64, n_x, n_y, tuple.epsilon, c_stab)
}
