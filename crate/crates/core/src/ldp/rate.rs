//! Bernoulli (dense) and Poisson (sparse) relative-entropy rate functions.

use super::report::{RateMode, RateReport, Witness};
use crate::error::{invalid, Error, Result};
use crate::graphon::quotient::{degree_alignment, minimize_over_permutations, EXACT_QUOTIENT_LIMIT};
use crate::graphon::{common_refinement, QuotientMode, StepGraphon};
use crate::sum::exact_sum;

/// `a log(a / b)` with `0 log(0/b) = 0` and `a log(a/0) = inf` for `a > 0`.
fn xlogx_over(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a * (a / b).ln()
    }
}

/// Relative entropy of `Bernoulli(v)` with respect to `Bernoulli(w)`.
pub fn bernoulli_relative_entropy(v: f64, w: f64) -> f64 {
    let r = xlogx_over(v, w) + xlogx_over(1.0 - v, 1.0 - w);
    r.max(0.0)
}

/// `l(z) = z log z - z + 1`, with `l(0) = 1`.
pub fn ell(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        (z * z.ln() - z + 1.0).max(0.0)
    }
}

fn common_pair(v: &StepGraphon, w: &StepGraphon) -> Result<(StepGraphon, StepGraphon)> {
    let m = common_refinement(v.resolution(), w.resolution())?;
    let lift = |g: &StepGraphon| if g.resolution() == m { Ok(g.clone()) } else { g.refine(m) };
    Ok((lift(v)?, lift(w)?))
}

fn require_dense(g: &StepGraphon, what: &str) -> Result<()> {
    if !g.is_dense() {
        return invalid(format!("{what} must be a dense graphon (bound 1), got bound {}", g.bound()));
    }
    Ok(())
}

fn upsilon_value(v: &StepGraphon, w: &StepGraphon) -> f64 {
    let n = v.resolution();
    exact_sum(
        v.values()
            .iter()
            .zip(w.values())
            .map(|(&a, &b)| bernoulli_relative_entropy(a, b)),
    ) / (n * n) as f64
}

/// Integrated Bernoulli relative entropy of `V` with respect to `W`.
pub fn upsilon(v: &StepGraphon, w: &StepGraphon) -> Result<RateReport> {
    require_dense(v, "V")?;
    require_dense(w, "W")?;
    let (v, w) = common_pair(v, w)?;
    Ok(RateReport::exact(upsilon_value(&v, &w)))
}

/// Minimum of `upsilon(V_sigma, W)` over cell permutations, with the
/// minimizing permutation as witness.
pub fn rate_quotient(v: &StepGraphon, w: &StepGraphon, mode: QuotientMode) -> Result<RateReport> {
    require_dense(v, "V")?;
    require_dense(w, "W")?;
    let (v, w) = common_pair(v, w)?;
    let n = v.resolution();
    let (exact, sweeps) = match mode {
        QuotientMode::Exact => {
            if n > EXACT_QUOTIENT_LIMIT {
                return Err(Error::TooLargeForExact {
                    what: "exact quotient rate",
                    n,
                    limit: EXACT_QUOTIENT_LIMIT,
                });
            }
            (true, 0)
        }
        QuotientMode::Heuristic { sweeps, .. } => (false, sweeps),
    };
    let start = degree_alignment(&v.degrees(), &w.degrees());
    let (value, sigma) = minimize_over_permutations(n, exact, start, sweeps, |s| {
        Ok(upsilon_value(&v.permuted(s)?, &w))
    })?;
    Ok(RateReport {
        value,
        mode: if exact { RateMode::Exact } else { RateMode::HeuristicUpper },
        witness: Some(Witness::Permutation(sigma)),
    })
}

/// `(1/n^2) sum_ij W_ij l(V_ij / W_ij)` for nonnegative `V` and dense `W`.
pub fn sparse_rate(v: &StepGraphon, w: &StepGraphon) -> Result<RateReport> {
    require_dense(w, "W")?;
    let (v, w) = common_pair(v, w)?;
    let n = v.resolution();
    let total = exact_sum(v.values().iter().zip(w.values()).map(|(&a, &b)| {
        if b == 0.0 {
            if a == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            b * ell(a / b)
        }
    }));
    Ok(RateReport::exact(total / (n * n) as f64))
}
