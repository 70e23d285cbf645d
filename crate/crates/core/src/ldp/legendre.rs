//! Legendre transform of the log-moment generating function of a finite law.

use crate::random_graphs::{FiniteLaw, GridFunction};
use crate::sum::exact_sum;

const TOL: f64 = 1e-10;

/// `log sum_k p_k exp(a x_k)`, stabilized.
fn log_mgf(law: &FiniteLaw, a: f64) -> f64 {
    let shift = law.atoms().iter().map(|x| a * x).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = law
        .atoms()
        .iter()
        .zip(law.probs())
        .filter(|(_, &p)| p > 0.0)
        .map(|(x, p)| p * (a * x - shift).exp())
        .sum();
    shift + s.ln()
}

/// Derivative of [`log_mgf`]: the mean of the exponentially tilted law.
fn tilted_mean(law: &FiniteLaw, a: f64) -> f64 {
    let shift = law.atoms().iter().map(|x| a * x).fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, &p) in law.atoms().iter().zip(law.probs()) {
        if p > 0.0 {
            let e = p * (a * x - shift).exp();
            num += x * e;
            den += e;
        }
    }
    num / den
}

/// `L(b) = sup_a [a b - log E exp(a X)]`; `+inf` outside the support hull.
pub fn legendre_rate(law: &FiniteLaw, b: f64) -> f64 {
    let support: Vec<(f64, f64)> = law
        .atoms()
        .iter()
        .zip(law.probs())
        .filter(|(_, &p)| p > 0.0)
        .map(|(&x, &p)| (x, p))
        .collect();
    let lo = support.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = support.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    if !(lo..=hi).contains(&b) {
        return f64::INFINITY;
    }
    // at an endpoint the supremum is the limit a -> -inf or +inf
    let mass_at = |x: f64| support.iter().filter(|s| s.0 == x).map(|s| s.1).sum::<f64>();
    if b == lo || b == hi {
        return -mass_at(b).ln();
    }
    let mean = tilted_mean(law, 0.0);
    if b == mean {
        return 0.0;
    }
    // tilted_mean is increasing in a; bracket the root of tilted_mean(a) = b
    let dir = if b > mean { 1.0 } else { -1.0 };
    let (mut a0, mut a1) = (0.0, dir);
    while (tilted_mean(law, a1) - b) * dir < 0.0 {
        a0 = a1;
        a1 *= 2.0;
        if a1.abs() > 1e12 {
            break;
        }
    }
    let (mut lo_a, mut hi_a) = if dir > 0.0 { (a0, a1) } else { (a1, a0) };
    for _ in 0..400 {
        let mid = 0.5 * (lo_a + hi_a);
        let g = tilted_mean(law, mid) - b;
        if g.abs() <= TOL * 1e-3 || mid == lo_a || mid == hi_a {
            lo_a = mid;
            hi_a = mid;
            break;
        }
        if g < 0.0 {
            lo_a = mid;
        } else {
            hi_a = mid;
        }
    }
    let a = 0.5 * (lo_a + hi_a);
    (a * b - log_mgf(law, a)).max(0.0)
}

/// `int L(l(x)) dx` for a candidate pre-image `l` of a convolved initial
/// condition; an upper bound on its rate.
pub fn integrated_legendre_rate(law: &FiniteLaw, preimage: &GridFunction) -> f64 {
    let n = preimage.resolution() as f64;
    exact_sum(preimage.values().iter().map(|&b| legendre_rate(law, b))) / n
}

/// Rate of a deterministic initial condition: 0 at `g0`, infinite elsewhere.
pub fn deterministic_rate(g: &GridFunction, g0: &GridFunction) -> f64 {
    if g == g0 {
        0.0
    } else {
        f64::INFINITY
    }
}
