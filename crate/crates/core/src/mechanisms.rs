//! Randomized algorithms under audit and the output events used to probe
//! them.
//!
//! A [`MechanismSpec`] describes an algorithm variant and its parameters.
//! The database (or query-answer vector) it runs on is passed separately,
//! so one spec can be sampled on both inputs of an audit tuple.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{NoiseSource, RngNoise};

/// One output of a mechanism.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Scalar(f64),
    Bits(Vec<u8>),
}

impl Output {
    pub fn kind(&self) -> &'static str {
        match self {
            Output::Scalar(_) => "scalar",
            Output::Bits(_) => "bits",
        }
    }
}

/// A measurable set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    /// The half line `(-inf, a]`.
    HalfLineLe(f64),
    /// A finite set of scalar values, matched by exact equality.
    PointSet(Vec<f64>),
    /// A single bit sequence, matched element-wise and in length.
    ExactBits(Vec<u8>),
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::HalfLineLe(_) => "half_line_le",
            Event::PointSet(_) => "point_set",
            Event::ExactBits(_) => "exact_bits",
        }
    }

    fn accepts_scalars(&self) -> bool {
        !matches!(self, Event::ExactBits(_))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Event::HalfLineLe(a) if a.is_nan() => Err(Error::config("half line bound is NaN")),
            Event::PointSet(points) if points.iter().any(|p| !p.is_finite()) => {
                Err(Error::config("point set contains a non-finite value"))
            }
            Event::ExactBits(bits) if bits.iter().any(|&b| b > 1) => {
                Err(Error::config("exact_bits entries must be 0 or 1"))
            }
            _ => Ok(()),
        }
    }

    /// Short label used in CSV output, e.g. `le:-0.5`.
    pub fn label(&self) -> String {
        match self {
            Event::HalfLineLe(a) => format!("le:{a}"),
            Event::PointSet(points) => {
                let parts: Vec<String> = points.iter().map(|p| p.to_string()).collect();
                format!("in:{}", parts.join(";"))
            }
            Event::ExactBits(bits) => {
                let s: String = bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect();
                format!("bits:{s}")
            }
        }
    }
}

/// Membership test `output ∈ event`.
pub fn event_contains(event: &Event, output: &Output) -> Result<bool> {
    match (event, output) {
        (Event::HalfLineLe(a), Output::Scalar(v)) => Ok(*v <= *a),
        (Event::PointSet(points), Output::Scalar(v)) => Ok(points.iter().any(|p| p == v)),
        (Event::ExactBits(pattern), Output::Bits(bits)) => Ok(pattern == bits),
        _ => Err(Error::TypeMismatch {
            event: event.kind(),
            output: output.kind(),
        }),
    }
}

/// Noise added by the sum mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdditiveNoise {
    Laplace { scale: f64 },
    Gaussian { variance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RnmVariant {
    /// Laplace noise, reports the 1-based index of the largest noisy answer.
    ReturnIndex,
    /// Laplace noise, reports the largest noisy answer itself.
    ReturnMaxValue,
    /// Exponential noise, reports the 1-based index.
    ExponentialNoiseIndex,
}

/// Sparse vector technique variants, numbered after Lyu, Su and Li.
///
/// With `u = sensitivity / epsilon`:
///
/// | variant | threshold noise | query noise  | resample after 1 | stop after c ones |
/// |---------|-----------------|--------------|------------------|-------------------|
/// | V1      | Lap(2u)         | Lap(4cu)     | no               | yes               |
/// | V2      | Lap(2cu)        | Lap(4cu)     | yes              | yes               |
/// | V4      | Lap(4u)         | Lap(4u/3)    | no               | yes               |
/// | V5      | Lap(2cu)        | none         | yes              | yes               |
/// | V6      | Lap(2u)         | Lap(2u)      | no               | no                |
///
/// V1 and V2 satisfy epsilon-DP; V4, V5 and V6 do not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvtVariant {
    V1,
    V2,
    V4,
    V5,
    V6,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvtParams {
    pub variant: SvtVariant,
    pub epsilon: f64,
    pub threshold: f64,
    pub bound: u32,
    pub sensitivity: f64,
}

/// An algorithm variant together with its privacy parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mechanism", rename_all = "snake_case")]
pub enum MechanismSpec {
    /// `sum(x) + Z`.
    LaplaceSum { noise: AdditiveNoise },
    /// Report noisy max over counting queries of sensitivity 1.
    ReportNoisyMax { epsilon: f64, variant: RnmVariant },
    Svt(SvtParams),
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("{name} must be positive and finite, got {value}")))
    }
}

impl MechanismSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            MechanismSpec::LaplaceSum { noise } => match noise {
                AdditiveNoise::Laplace { scale } => positive("laplace scale", *scale),
                AdditiveNoise::Gaussian { variance } => positive("gaussian variance", *variance),
            },
            MechanismSpec::ReportNoisyMax { epsilon, .. } => positive("epsilon", *epsilon),
            MechanismSpec::Svt(p) => {
                positive("epsilon", p.epsilon)?;
                positive("sensitivity", p.sensitivity)?;
                if !p.threshold.is_finite() {
                    return Err(Error::config("svt threshold must be finite"));
                }
                if p.bound == 0 {
                    return Err(Error::config("svt bound c must be at least 1"));
                }
                Ok(())
            }
        }
    }

    /// Checks that `input` is a valid database or query vector for this spec.
    pub fn validate_input(&self, input: &[f64]) -> Result<()> {
        if input.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("mechanism input contains a non-finite value"));
        }
        match self {
            MechanismSpec::LaplaceSum { .. } => {
                if input.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return Err(Error::config("database entries must lie in [0, 1]"));
                }
                Ok(())
            }
            MechanismSpec::ReportNoisyMax { .. } if input.is_empty() => {
                Err(Error::config("report noisy max needs at least one query"))
            }
            _ => Ok(()),
        }
    }

    /// Whether the outputs are scalars (as opposed to bit sequences).
    pub fn emits_scalars(&self) -> bool {
        !matches!(self, MechanismSpec::Svt(_))
    }

    /// Checks that `event` lives in this mechanism's output space.
    pub fn check_event(&self, event: &Event) -> Result<()> {
        if self.emits_scalars() == event.accepts_scalars() {
            Ok(())
        } else {
            Err(Error::TypeMismatch {
                event: event.kind(),
                output: if self.emits_scalars() { "scalar" } else { "bits" },
            })
        }
    }

    /// One draw of the mechanism on `input`.
    pub fn run<N: NoiseSource + ?Sized>(&self, input: &[f64], noise: &mut N) -> Result<Output> {
        match self {
            MechanismSpec::LaplaceSum { noise: kind } => Ok(run_laplace_sum(input, *kind, noise)),
            MechanismSpec::ReportNoisyMax { epsilon, variant } => {
                run_rnm(input, *epsilon, *variant, noise)
            }
            MechanismSpec::Svt(params) => Ok(run_svt(input, params, noise)),
        }
    }
}

pub fn run_laplace_sum<N: NoiseSource + ?Sized>(
    database: &[f64],
    kind: AdditiveNoise,
    noise: &mut N,
) -> Output {
    let sum: f64 = database.iter().sum();
    let z = match kind {
        AdditiveNoise::Laplace { scale } => noise.laplace(scale),
        AdditiveNoise::Gaussian { variance } => noise.gaussian(variance),
    };
    Output::Scalar(sum + z)
}

pub fn run_rnm<N: NoiseSource + ?Sized>(
    queries: &[f64],
    epsilon: f64,
    variant: RnmVariant,
    noise: &mut N,
) -> Result<Output> {
    if queries.is_empty() {
        return Err(Error::config("report noisy max needs at least one query"));
    }
    let scale = 2.0 / epsilon;
    let mut best_index = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, q) in queries.iter().enumerate() {
        let z = match variant {
            RnmVariant::ExponentialNoiseIndex => noise.exponential(scale),
            RnmVariant::ReturnIndex | RnmVariant::ReturnMaxValue => noise.laplace(scale),
        };
        let value = q + z;
        // strict comparison: the lowest index wins ties
        if value > best_value {
            best_value = value;
            best_index = i;
        }
    }
    Ok(match variant {
        RnmVariant::ReturnMaxValue => Output::Scalar(best_value),
        _ => Output::Scalar((best_index + 1) as f64),
    })
}

pub fn run_svt<N: NoiseSource + ?Sized>(queries: &[f64], p: &SvtParams, noise: &mut N) -> Output {
    let c = f64::from(p.bound);
    let unit = p.sensitivity / p.epsilon;
    // (threshold scale, query scale or None, resample after a 1, abort at c)
    let (threshold_scale, query_scale, resample, abort) = match p.variant {
        SvtVariant::V1 => (2.0 * unit, Some(4.0 * c * unit), false, true),
        SvtVariant::V2 => (2.0 * c * unit, Some(4.0 * c * unit), true, true),
        SvtVariant::V4 => (4.0 * unit, Some(4.0 / 3.0 * unit), false, true),
        SvtVariant::V5 => (2.0 * c * unit, None, true, true),
        SvtVariant::V6 => (2.0 * unit, Some(2.0 * unit), false, false),
    };

    let mut bits = Vec::with_capacity(queries.len());
    let mut count = 0u32;
    let mut rho = noise.laplace(threshold_scale);
    for q in queries {
        let z = query_scale.map_or(0.0, |s| noise.laplace(s));
        if q + z >= p.threshold + rho {
            bits.push(1);
            if resample {
                rho = noise.laplace(threshold_scale);
            }
            count += 1;
            if abort && count >= p.bound {
                break;
            }
        } else {
            bits.push(0);
        }
    }
    Output::Bits(bits)
}

/// `n` independent draws of `spec` on `input`.
pub fn sample_batch<R: Rng + ?Sized>(
    spec: &MechanismSpec,
    input: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<Vec<Output>> {
    if n == 0 {
        return Err(Error::contract("batch size must be at least 1"));
    }
    spec.validate()?;
    spec.validate_input(input)?;
    let mut noise = RngNoise(rng);
    (0..n).map(|_| spec.run(input, &mut noise)).collect()
}

/// Draws `n` outputs and counts those inside `event`, without storing them.
///
/// Consumes the generator exactly like [`sample_batch`] followed by
/// [`crate::estimation::count_hits`].
pub fn sample_hits<R: Rng + ?Sized>(
    spec: &MechanismSpec,
    input: &[f64],
    event: &Event,
    n: usize,
    rng: &mut R,
) -> Result<u64> {
    if n == 0 {
        return Err(Error::contract("batch size must be at least 1"));
    }
    let mut noise = RngNoise(rng);
    let mut hits = 0;
    for _ in 0..n {
        if event_contains(event, &spec.run(input, &mut noise)?)? {
            hits += 1;
        }
    }
    Ok(hits)
}
