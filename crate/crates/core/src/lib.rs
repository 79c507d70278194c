//! Continuous auditing of an evolving randomized algorithm for violations
//! of differential privacy.
//!
//! At every time point the algorithm is run `n` times on each of two
//! neighboring inputs, the empirical privacy gap for a fixed output event
//! is standardized ([`estimation`]), and the standardized values are
//! aggregated over all trailing windows ([`detector`]). A violation is
//! reported when the aggregate exceeds a threshold calibrated on Brownian
//! motion ([`threshold`]).

pub mod baseline;
pub mod detector;
pub mod error;
pub mod estimation;
pub mod fmt;
pub mod harness;
pub mod mechanisms;
pub mod noise;
pub mod panel;
pub mod rng;
pub mod threshold;

pub use error::{Error, Result};
