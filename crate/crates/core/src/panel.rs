//! Several monitors on the same evolving algorithm, combined with a
//! Bonferroni correction: each of the `m` members runs at level
//! `global_alpha / m`, and the panel reports a violation as soon as any
//! member does.

use rayon::prelude::*;

use crate::detector::Detector;
use crate::error::{Error, Result};
use crate::estimation::{count_hits, estimate_step, AuditTuple};
use crate::harness::experiment::detection_curve_from;
use crate::harness::monitor::{monitor_schedule, MonitorConfig};
use crate::harness::scenario::{laplace_sum, sum_databases, Schedule};
use crate::mechanisms::{sample_batch, Event};
use crate::rng::stream;

#[derive(Debug, Clone, PartialEq)]
pub struct PanelConfig {
    pub members: Vec<AuditTuple>,
    pub global_alpha: f64,
    /// Evaluate every member's event on one shared pair of batches per time
    /// point instead of drawing fresh batches per member.
    pub shared_batches: bool,
}

impl PanelConfig {
    pub fn new(members: Vec<AuditTuple>, global_alpha: f64, shared_batches: bool) -> Result<Self> {
        let cfg = Self {
            members,
            global_alpha,
            shared_batches,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::config("a panel needs at least one member"));
        }
        if !(self.global_alpha > 0.0 && self.global_alpha < 1.0) {
            return Err(Error::config(format!(
                "global alpha must lie in (0, 1), got {}",
                self.global_alpha
            )));
        }
        for m in &self.members {
            m.validate()?;
        }
        if self.shared_batches {
            let first = &self.members[0];
            if self
                .members
                .iter()
                .any(|m| m.x != first.x || m.x_prime != first.x_prime)
            {
                return Err(Error::config("shared batches require every member to use the same inputs"));
            }
        }
        Ok(())
    }

    pub fn per_member_alpha(&self) -> f64 {
        self.global_alpha / self.members.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberResult {
    pub event_label: String,
    pub curve: Vec<f64>,
    pub first_detections: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelResult {
    pub global_alpha: f64,
    pub per_member_alpha: f64,
    pub q: f64,
    pub members: Vec<MemberResult>,
    pub aggregate_curve: Vec<f64>,
    pub aggregate_first_detections: Vec<Option<usize>>,
}

/// Per-member first detections of one replication.
fn replicate(config: &PanelConfig, schedule: &Schedule, cfg: &MonitorConfig, seed: u64, rep: usize) -> Result<Vec<Option<usize>>> {
    if !config.shared_batches {
        return config
            .members
            .iter()
            .enumerate()
            .map(|(j, tuple)| {
                let mut rng = stream(seed, &[rep as u64, j as u64]);
                Ok(monitor_schedule(schedule, tuple, cfg, &mut rng)?.first_detection)
            })
            .collect();
    }

    let mut rng = stream(seed, &[rep as u64]);
    let mut detectors = config
        .members
        .iter()
        .map(|_| Detector::new(cfg.horizon, cfg.beta, cfg.q))
        .collect::<Result<Vec<_>>>()?;
    let (x, x_prime) = (&config.members[0].x, &config.members[0].x_prime);
    for t in 1..=cfg.horizon {
        let spec = schedule.at(t);
        let out_x = sample_batch(spec, x, cfg.n, &mut rng)?;
        let out_y = sample_batch(spec, x_prime, cfg.n, &mut rng)?;
        for (tuple, det) in config.members.iter().zip(detectors.iter_mut()) {
            let step = estimate_step(
                cfg.n as u64,
                count_hits(&out_x, &tuple.event)?,
                count_hits(&out_y, &tuple.event)?,
                tuple.epsilon,
                cfg.c_stab,
            )?;
            det.push(step.ratio)?;
        }
    }
    Ok(detectors.iter().map(Detector::first_crossing).collect())
}

/// Runs `reps` replications of the panel. `cfg.q` must be the threshold for
/// the per-member level.
pub fn panel_run(
    config: &PanelConfig,
    schedule: &Schedule,
    cfg: &MonitorConfig,
    reps: usize,
    seed: u64,
) -> Result<PanelResult> {
    config.validate()?;
    cfg.validate()?;
    if reps == 0 {
        return Err(Error::config("reps must be at least 1"));
    }
    for spec in schedule.mechanisms() {
        for tuple in &config.members {
            tuple.check_against(spec)?;
        }
    }

    let per_rep = (0..reps)
        .into_par_iter()
        .map(|rep| replicate(config, schedule, cfg, seed, rep))
        .collect::<Result<Vec<_>>>()?;

    let members = config
        .members
        .iter()
        .enumerate()
        .map(|(j, tuple)| {
            let firsts: Vec<Option<usize>> = per_rep.iter().map(|r| r[j]).collect();
            MemberResult {
                event_label: tuple.event.label(),
                curve: detection_curve_from(&firsts, cfg.horizon),
                first_detections: firsts,
            }
        })
        .collect();
    let aggregate: Vec<Option<usize>> = per_rep.iter().map(|r| r.iter().flatten().min().copied()).collect();

    Ok(PanelResult {
        global_alpha: config.global_alpha,
        per_member_alpha: config.per_member_alpha(),
        q: cfg.q,
        members,
        aggregate_curve: detection_curve_from(&aggregate, cfg.horizon),
        aggregate_first_detections: aggregate,
    })
}

/// Sum mechanism whose Laplace scale drops from 1 to 0.9 at `change_time`,
/// audited with half-line events `(-inf, a]`.
pub fn laplace_scale_panel(
    thresholds: &[f64],
    global_alpha: f64,
    shared_batches: bool,
    change_time: usize,
) -> Result<(PanelConfig, Schedule)> {
    let (x, x_prime) = sum_databases();
    let members = thresholds
        .iter()
        .map(|&a| AuditTuple {
            x: x.clone(),
            x_prime: x_prime.clone(),
            event: Event::HalfLineLe(a),
            epsilon: 1.0,
        })
        .collect();
    let config = PanelConfig::new(members, global_alpha, shared_batches)?;
    let schedule = Schedule::single_change(laplace_sum(1.0), laplace_sum(0.9), change_time)?;
    Ok((config, schedule))
}
