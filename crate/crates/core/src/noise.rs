//! Noise sources consumed by the mechanisms.
//!
//! Laplace and exponential variates use the inverse-CDF transform of a
//! single uniform draw on the open interval (0, 1).

use rand::distributions::Open01;
use rand::Rng;
use rand_distr::StandardNormal;

/// Supplies the random perturbations a mechanism needs.
pub trait NoiseSource {
    /// Laplace(0, scale).
    fn laplace(&mut self, scale: f64) -> f64;
    /// Exponential with mean `scale`.
    fn exponential(&mut self, scale: f64) -> f64;
    /// Normal(0, variance).
    fn gaussian(&mut self, variance: f64) -> f64;
}

/// Inverse CDF of Laplace(0, scale) evaluated at `u` in (0, 1).
pub fn laplace_inverse_cdf(u: f64, scale: f64) -> f64 {
    let centered = u - 0.5;
    -scale * centered.signum() * (1.0 - 2.0 * centered.abs()).ln()
}

/// Inverse CDF of the exponential distribution with mean `scale`.
pub fn exponential_inverse_cdf(u: f64, scale: f64) -> f64 {
    -scale * (1.0 - u).ln()
}

/// Noise drawn from a random generator.
pub struct RngNoise<'a, R: Rng + ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> NoiseSource for RngNoise<'_, R> {
    fn laplace(&mut self, scale: f64) -> f64 {
        let u: f64 = self.0.sample(Open01);
        laplace_inverse_cdf(u, scale)
    }

    fn exponential(&mut self, scale: f64) -> f64 {
        let u: f64 = self.0.sample(Open01);
        exponential_inverse_cdf(u, scale)
    }

    fn gaussian(&mut self, variance: f64) -> f64 {
        let z: f64 = self.0.sample(StandardNormal);
        z * variance.sqrt()
    }
}

/// Every perturbation is exactly zero. Running a mechanism with this source
/// yields its noiseless trace.
#[derive(Debug, Default, Clone, Copy)]
pub struct Noiseless;

impl NoiseSource for Noiseless {
    fn laplace(&mut self, _scale: f64) -> f64 {
        0.0
    }

    fn exponential(&mut self, _scale: f64) -> f64 {
        0.0
    }

    fn gaussian(&mut self, _variance: f64) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn laplace_quantiles() {
        assert_eq!(laplace_inverse_cdf(0.5, 1.0), 0.0);
        // F(t) = e^t / 2 for t <= 0.
        let t = laplace_inverse_cdf(0.5 * (-1.0f64).exp(), 1.0);
        assert!((t + 1.0).abs() < 1e-12);
        let t = laplace_inverse_cdf(1.0 - 0.5 * (-2.0f64).exp(), 0.5);
        assert!((t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_quantile() {
        let t = exponential_inverse_cdf(1.0 - (-1.0f64).exp(), 2.0);
        assert!((t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn moments() {
        let mut rng = stream(11, &[]);
        let mut noise = RngNoise(&mut rng);
        let n = 200_000;
        let (mut lap, mut lap2, mut exp, mut gau2) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let l = noise.laplace(2.0);
            lap += l;
            lap2 += l * l;
            exp += noise.exponential(2.0);
            let g = noise.gaussian(2.0);
            gau2 += g * g;
        }
        let n = n as f64;
        assert!((lap / n).abs() < 0.03);
        assert!((lap2 / n - 8.0).abs() < 0.25);
        assert!((exp / n - 2.0).abs() < 0.03);
        assert!((gau2 / n - 2.0).abs() < 0.04);
    }

    #[test]
    fn noiseless_is_zero() {
        let mut n = Noiseless;
        assert_eq!(n.laplace(3.0) + n.exponential(3.0) + n.gaussian(3.0), 0.0);
    }
}
