use proptest::prelude::*;

use dpmon::estimation::{estimate_step, measure_step, true_gap, AuditTuple, StepStatistic, DEFAULT_C_STAB};
use dpmon::harness::scenario::{laplace_sum, sum_databases};
use dpmon::mechanisms::Event;
use dpmon::rng::stream;

const BATCHES: usize = 10_000;
const N: usize = 750;

fn laplace_steps(scale: f64, seed: u64) -> Vec<StepStatistic> {
    let (x, x_prime) = sum_databases();
    let tuple = AuditTuple {
        x,
        x_prime,
        event: Event::HalfLineLe(0.0),
        epsilon: 1.0,
    };
    let spec = laplace_sum(scale);
    let mut rng = stream(seed, &[]);
    (0..BATCHES)
        .map(|_| measure_step(&spec, &tuple, N, DEFAULT_C_STAB, &mut rng).unwrap())
        .collect()
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, v)
}

#[test]
fn gap_estimate_is_unbiased() {
    let e = 1f64.exp();
    for (scale, p) in [(1.0, true_gap(0.5, 0.5 / e, 1.0)), (0.5, true_gap(0.5, 0.5 / (e * e), 1.0))] {
        let steps = laplace_steps(scale, 11);
        let (m, v) = mean_var(&steps.iter().map(|s| s.p_hat).collect::<Vec<_>>());
        let se = (v / BATCHES as f64).sqrt();
        assert!((m - p).abs() <= 4.0 * se, "scale {scale}: mean {m}, gap {p}, se {se}");
    }
}

#[test]
fn studentized_gap_is_standard() {
    let e = 1f64.exp();
    for (scale, p) in [(1.0, 0.0), (0.5, 0.5 - 0.5 / e)] {
        let z: Vec<f64> = laplace_steps(scale, 12).iter().map(|s| (s.p_hat - p) / s.sigma_stab).collect();
        let (m, v) = mean_var(&z);
        assert!(m.abs() <= 0.05, "scale {scale}: mean {m}");
        assert!((0.85..=1.15).contains(&v), "scale {scale}: variance {v}");
    }
}

proptest! {
    #[test]
    fn variance_bounded_by_bernoulli_maximum(n in 1u64..5000, fx in 0.0f64..=1.0, fy in 0.0f64..=1.0, eps in 0.0f64..3.0) {
        let n_x = (fx * n as f64) as u64;
        let n_y = (fy * n as f64) as u64;
        let s = estimate_step(n, n_x, n_y, eps, DEFAULT_C_STAB).unwrap();
        let bound = (1.0 + (2.0 * eps).exp()) / (4.0 * n as f64);
        prop_assert!(s.sigma_hat * s.sigma_hat <= bound * (1.0 + 1e-12));
        prop_assert!(s.sigma_stab >= DEFAULT_C_STAB && s.sigma_stab >= s.sigma_hat);
        prop_assert!(s.ratio.is_finite());
        prop_assert!(s.ratio == 0.0 || s.ratio.signum() == s.p_hat.signum());
    }

    #[test]
    fn more_hits_under_x_raise_the_gap(n in 2u64..2000, n_x in 0u64..1000, n_y in 0u64..1000) {
        prop_assume!(n_x < n && n_y <= n);
        let a = estimate_step(n, n_x, n_y, 1.0, DEFAULT_C_STAB).unwrap();
        let b = estimate_step(n, n_x + 1, n_y, 1.0, DEFAULT_C_STAB).unwrap();
        prop_assert!(b.p_hat > a.p_hat);
    }

    #[test]
    fn counts_above_batch_size_are_rejected(n in 1u64..100, extra in 1u64..10) {
        prop_assert!(estimate_step(n, n + extra, 0, 1.0, DEFAULT_C_STAB).is_err());
        prop_assert!(estimate_step(n, 0, n + extra, 1.0, DEFAULT_C_STAB).is_err());
    }
}
