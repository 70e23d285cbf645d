//! A weak-topology surrogate for couplings: the largest discrepancy over a
//! fixed dictionary of low-frequency product test functions.

use std::f64::consts::PI;

use super::coupling::DiscreteCoupling;
use super::bijection::{pushforward_blocks, staircase_bijection};
use crate::error::{invalid, Result};
use crate::sum::exact_sum;

const MAX_FREQ: usize = 4;

#[derive(Clone, Copy)]
enum Wave {
    Cos,
    Sin,
}

/// Average of `cos(pi p t)` or `sin(pi p t)` over `[a, b]`.
fn average(w: Wave, p: usize, a: f64, b: f64) -> f64 {
    let f = PI * p as f64;
    match w {
        Wave::Cos => ((f * b).sin() - (f * a).sin()) / (f * (b - a)),
        Wave::Sin => ((f * a).cos() - (f * b).cos()) / (f * (b - a)),
    }
}

/// Integrals of the 32 test functions `cos(pi p x) cos(pi q y)` and
/// `sin(pi p x) sin(pi q y)`, `p, q = 1..4`, against a block-uniform density.
pub fn test_integrals(nu: &DiscreteCoupling) -> Vec<f64> {
    let k = nu.k();
    let edges = |i: usize| (i as f64 / k as f64, (i + 1) as f64 / k as f64);
    let mut out = Vec::with_capacity(2 * MAX_FREQ * MAX_FREQ);
    for wave in [Wave::Cos, Wave::Sin] {
        let avg: Vec<Vec<f64>> = (1..=MAX_FREQ)
            .map(|p| (0..k).map(|i| {
                let (a, b) = edges(i);
                average(wave, p, a, b)
            }).collect())
            .collect();
        for p in 0..MAX_FREQ {
            for q in 0..MAX_FREQ {
                out.push(exact_sum(
                    (0..k * k).map(|ij| nu.masses()[ij] * avg[p][ij / k] * avg[q][ij % k]),
                ));
            }
        }
    }
    out
}

/// Maximum absolute difference of the test-function integrals.
pub fn weak_distance(a: &DiscreteCoupling, b: &DiscreteCoupling) -> f64 {
    test_integrals(a)
        .into_iter()
        .zip(test_integrals(b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Distance between `nu` and the coupling induced on its own grid by the
/// staircase of `nu` coarsened to `c` blocks, for each `c` in `levels`.
pub fn staircase_convergence(nu: &DiscreteCoupling, levels: &[usize]) -> Result<Vec<f64>> {
    let k = nu.k();
    levels
        .iter()
        .map(|&c| {
            if c == 0 || !k.is_multiple_of(c) {
                return invalid(format!("level {c} does not divide the coupling grid {k}"));
            }
            let theta = staircase_bijection(&nu.coarsen(c)?)?;
            let induced = DiscreteCoupling::new(k, pushforward_blocks(&theta, k)?)?;
            Ok(weak_distance(nu, &induced))
        })
        .collect()
}
