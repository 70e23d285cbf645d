//! Bernstein-type tail bound for bounded, adaptively dependent summands,
//! and Monte Carlo processes to check it against.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::{exec, seed};

/// `h(u) = (1 + u) log(1 + u) - u`.
pub fn h(u: f64) -> f64 {
    if u.abs() < 1e-2 {
        // sum_{k >= 2} (-1)^k u^k / (k (k - 1))
        let mut term = u * u;
        let mut acc = 0.0;
        for k in 2..12 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * term / (k * (k - 1)) as f64;
            term *= u;
        }
        acc
    } else {
        (1.0 + u) * u.ln_1p() - u
    }
}

/// `exp(-N h(delta / c))`.
pub fn bernstein_bound(n: usize, c: f64, delta: f64) -> Result<f64> {
    if n == 0 || !(c > 0.0) || !(delta > 0.0) {
        return invalid("bernstein bound needs N >= 1, c > 0 and delta > 0");
    }
    Ok((-(n as f64) * h(delta / c)).exp())
}

/// 0/1 sequences with computable conditional means `m_i = P(Z_i = 1 | past)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BinaryProcess {
    Iid { p: f64 },
    /// Two-state Markov chain: `P(Z_i = 1) = after_zero` or `after_one`
    /// depending on `Z_{i-1}`; `Z_1 ~ Bernoulli(1/2)`.
    Markov { after_zero: f64, after_one: f64 },
    /// `P(Z_i = 1) = base + gain * (running mean of Z_1..Z_{i-1} - 1/2)`,
    /// clamped to `[0, 1]`.
    Adaptive { base: f64, gain: f64 },
}

impl BinaryProcess {
    /// `(1/N) sum_i (Z_i - m_i)` for one realization.
    pub fn centered_mean<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> f64 {
        let mut prev = 0u8;
        let mut ones = 0usize;
        let mut acc = 0.0;
        for i in 0..n {
            let m = match *self {
                BinaryProcess::Iid { p } => p,
                BinaryProcess::Markov { after_zero, after_one } => {
                    if i == 0 {
                        0.5
                    } else if prev == 1 {
                        after_one
                    } else {
                        after_zero
                    }
                }
                BinaryProcess::Adaptive { base, gain } => {
                    let mean = if i == 0 { 0.5 } else { ones as f64 / i as f64 };
                    (base + gain * (mean - 0.5)).clamp(0.0, 1.0)
                }
            };
            let z = (rng.gen::<f64>() < m) as u8;
            acc += z as f64 - m;
            ones += z as usize;
            prev = z;
        }
        acc / n as f64
    }
}

/// Empirical frequency of `(1/N) sum (Z_i - m_i) >= delta` for each delta.
pub fn empirical_tail(
    process: BinaryProcess,
    n: usize,
    deltas: &[f64],
    replicas: usize,
    seed: u64,
) -> Vec<f64> {
    let means = exec::map_range(replicas, |r| {
        let mut rng = seed::rng(seed::derive(seed, r as u64));
        process.centered_mean(n, &mut rng)
    });
    deltas
        .iter()
        .map(|&d| means.iter().filter(|&&m| m >= d).count() as f64 / replicas as f64)
        .collect()
}
