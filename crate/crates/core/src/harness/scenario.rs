//! The eight reference scenarios and the change schedule they run on.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::AuditTuple;
use crate::mechanisms::{AdditiveNoise, Event, MechanismSpec, RnmVariant, SvtParams, SvtVariant};

pub const SCENARIO_IDS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// Default time of the modification.
pub const DEFAULT_CHANGE_TIME: usize = 50;

/// Piecewise-constant sequence of deployed mechanisms. Segment `i` is in
/// force from its start time (1-based, inclusive) until the next segment
/// starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    segments: Vec<(usize, MechanismSpec)>,
}

impl Schedule {
    pub fn new(segments: Vec<(usize, MechanismSpec)>) -> Result<Self> {
        match segments.first() {
            None => return Err(Error::config("schedule has no segments")),
            Some((start, _)) if *start != 1 => {
                return Err(Error::config("the first schedule segment must start at t = 1"))
            }
            _ => {}
        }
        if segments.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::config("schedule change times must be strictly increasing"));
        }
        for (_, spec) in &segments {
            spec.validate()?;
        }
        Ok(Self { segments })
    }

    /// A single modification at `change_time`.
    pub fn single_change(pre: MechanismSpec, post: MechanismSpec, change_time: usize) -> Result<Self> {
        if change_time <= 1 {
            return Self::new(vec![(1, post)]);
        }
        Self::new(vec![(1, pre), (change_time, post)])
    }

    pub fn at(&self, t: usize) -> &MechanismSpec {
        let idx = self.segments.partition_point(|(start, _)| *start <= t);
        &self.segments[idx.saturating_sub(1)].1
    }

    pub fn mechanisms(&self) -> impl Iterator<Item = &MechanismSpec> {
        self.segments.iter().map(|(_, m)| m)
    }
}

/// One monitoring experiment: an algorithm modified once, audited with a
/// fixed tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: String,
    pub pre_change: MechanismSpec,
    pub post_change: MechanismSpec,
    pub change_time: usize,
    pub tuple: AuditTuple,
    /// Whether the modification breaks the privacy guarantee.
    pub harmful: bool,
}

impl ScenarioSpec {
    pub fn validate(&self, horizon: usize) -> Result<()> {
        if self.change_time == 0 || self.change_time > horizon {
            return Err(Error::config(format!(
                "change time {} outside the horizon 1..={horizon}",
                self.change_time
            )));
        }
        if self.pre_change.emits_scalars() != self.post_change.emits_scalars() {
            return Err(Error::config("pre- and post-change mechanisms have different output spaces"));
        }
        self.tuple.validate()?;
        self.tuple.check_against(&self.pre_change)?;
        self.tuple.check_against(&self.post_change)
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Schedule::single_change(self.pre_change.clone(), self.post_change.clone(), self.change_time)
    }

    /// Reads a scenario override file.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

const EPSILON: f64 = 1.0;
const RISING: [f64; 10] = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0];
const FALLING: [f64; 10] = [1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];

pub fn laplace_sum(scale: f64) -> MechanismSpec {
    MechanismSpec::LaplaceSum {
        noise: AdditiveNoise::Laplace { scale },
    }
}

/// Databases of size 10 differing in the first entry.
pub fn sum_databases() -> (Vec<f64>, Vec<f64>) {
    let x = vec![0.0; 10];
    let mut x_prime = x.clone();
    x_prime[0] = 1.0;
    (x, x_prime)
}

fn rnm(variant: RnmVariant) -> MechanismSpec {
    MechanismSpec::ReportNoisyMax {
        epsilon: EPSILON,
        variant,
    }
}

fn svt(variant: SvtVariant) -> MechanismSpec {
    MechanismSpec::Svt(SvtParams {
        variant,
        epsilon: EPSILON,
        threshold: 1.0,
        bound: 1,
        sensitivity: 1.0,
    })
}

pub fn build_scenario(id: &str) -> Result<ScenarioSpec> {
    let (db_x, db_x_prime) = sum_databases();
    let tuple = |x: &[f64], x_prime: &[f64], event: Event| AuditTuple {
        x: x.to_vec(),
        x_prime: x_prime.to_vec(),
        event,
        epsilon: EPSILON,
    };
    let ones = [1.0; 5];
    let twos = [2.0; 5];
    let (pre, post, tuple, harmful) = match id {
        "a" => (
            laplace_sum(1.0),
            laplace_sum(0.5),
            tuple(&db_x, &db_x_prime, Event::HalfLineLe(0.0)),
            true,
        ),
        "b" => (
            laplace_sum(1.0),
            MechanismSpec::LaplaceSum {
                noise: AdditiveNoise::Gaussian { variance: 2.0 },
            },
            tuple(&db_x, &db_x_prime, Event::HalfLineLe(-1.0)),
            true,
        ),
        "c" => (
            rnm(RnmVariant::ReturnIndex),
            rnm(RnmVariant::ReturnMaxValue),
            tuple(&ones, &twos, Event::HalfLineLe(2.0)),
            true,
        ),
        "d" => (
            svt(SvtVariant::V2),
            svt(SvtVariant::V4),
            tuple(&RISING, &FALLING, Event::ExactBits(vec![0, 0, 0, 0, 0, 0, 1])),
            true,
        ),
        "e" => (
            svt(SvtVariant::V2),
            svt(SvtVariant::V5),
            tuple(&RISING, &FALLING, Event::ExactBits(vec![0, 0, 0, 0, 0, 1])),
            true,
        ),
        "f" => (
            svt(SvtVariant::V2),
            svt(SvtVariant::V6),
            tuple(&FALLING, &RISING, Event::ExactBits(vec![1, 1, 1, 1, 1, 0, 0, 0, 0, 0])),
            true,
        ),
        "g" => (
            rnm(RnmVariant::ReturnIndex),
            rnm(RnmVariant::ExponentialNoiseIndex),
            tuple(&ones, &twos, Event::PointSet(vec![3.0])),
            false,
        ),
        "h" => (
            svt(SvtVariant::V2),
            svt(SvtVariant::V1),
            tuple(&RISING, &FALLING, Event::ExactBits(vec![0, 0, 0, 0, 0, 0, 1])),
            false,
        ),
        other => return Err(Error::UnknownScenario(other.to_string())),
    };
    Ok(ScenarioSpec {
        id: id.to_string(),
        pre_change: pre,
        post_change: post,
        change_time: DEFAULT_CHANGE_TIME,
        tuple,
        harmful,
    })
}
