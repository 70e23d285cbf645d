//! Distances between step graphons and their relabeling quotient.

use serde::{Deserialize, Serialize};

use super::norm::{self, NormMode};
use super::step::{Permutation, StepGraphon};
use crate::error::{Error, Result};
use crate::exec;

/// Largest resolution for which the quotient distance is enumerated exactly.
pub const EXACT_QUOTIENT_LIMIT: usize = 8;

/// Inner norms during the swap search are exact up to this resolution.
const LOCAL_SEARCH_EXACT_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum QuotientMode {
    Exact,
    /// Degree-sorted start followed by `sweeps` passes of pairwise swaps.
    Heuristic { sweeps: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientDistance {
    pub distance: f64,
    pub permutation: Permutation,
    /// `true` when `distance` is the exact minimum over cell permutations.
    pub exact: bool,
}

/// Infinity-to-one distance on the least common refinement.
pub fn d_inf_one(f: &StepGraphon, g: &StepGraphon, mode: NormMode) -> Result<f64> {
    norm::inf_one_norm(&f.difference(g)?, mode)
}

/// Cut distance on the least common refinement.
pub fn d_cut(f: &StepGraphon, g: &StepGraphon, mode: NormMode) -> Result<f64> {
    norm::cut_norm(&f.difference(g)?, mode)
}

fn to_common(f: &StepGraphon, g: &StepGraphon) -> Result<(StepGraphon, StepGraphon)> {
    let m = super::step::common_refinement(f.resolution(), g.resolution())?;
    let lift = |h: &StepGraphon| if h.resolution() == m { Ok(h.clone()) } else { h.refine(m) };
    Ok((lift(f)?, lift(g)?))
}

/// Initial relabeling that aligns nodes of `f` and `g` by degree rank.
pub fn degree_alignment(f_degrees: &[f64], g_degrees: &[f64]) -> Permutation {
    let rank = |d: &[f64]| {
        let mut idx: Vec<usize> = (0..d.len()).collect();
        idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
        idx
    };
    let (rf, rg) = (rank(f_degrees), rank(g_degrees));
    let mut map = vec![0; f_degrees.len()];
    for (k, &i) in rg.iter().enumerate() {
        map[i] = rf[k];
    }
    Permutation::new(map).expect("rank matching is a bijection")
}

/// Minimizes `objective(sigma)` over permutations: exhaustively when
/// `exact`, otherwise by first-improvement pairwise swaps from `start`.
pub(crate) fn minimize_over_permutations<F>(
    n: usize,
    exact: bool,
    start: Permutation,
    sweeps: usize,
    objective: F,
) -> Result<(f64, Permutation)>
where
    F: Fn(&Permutation) -> Result<f64> + Sync + Send,
{
    if exact {
        let all = Permutation::all(n);
        let values = exec::map_range(all.len(), |k| objective(&all[k]));
        let mut best: Option<(f64, usize)> = None;
        for (k, v) in values.into_iter().enumerate() {
            let v = v?;
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, k));
            }
        }
        let (v, k) = best.expect("at least one permutation");
        return Ok((v, all[k].clone()));
    }
    let mut sigma = start;
    let mut best = objective(&sigma)?;
    for _ in 0..sweeps {
        let mut improved = false;
        for p in 0..n {
            for q in p + 1..n {
                sigma.swap(p, q);
                let v = objective(&sigma)?;
                if v < best {
                    best = v;
                    improved = true;
                } else {
                    sigma.swap(p, q);
                }
            }
        }
        if !improved || best == 0.0 {
            break;
        }
    }
    Ok((best, sigma))
}

/// Minimum of `d_inf_one(f_sigma, g)` over cell permutations `sigma`.
///
/// Exact mode enumerates all `n!` relabelings (n <= 8). Heuristic mode
/// returns the value at the best permutation found, an upper bound on the
/// minimum; the inner norm is exact up to n = 16 and heuristic beyond.
pub fn delta_inf_one(
    f: &StepGraphon,
    g: &StepGraphon,
    mode: QuotientMode,
) -> Result<QuotientDistance> {
    let (f, g) = to_common(f, g)?;
    let n = f.resolution();
    let (exact, sweeps, inner) = match mode {
        QuotientMode::Exact => {
            if n > EXACT_QUOTIENT_LIMIT {
                return Err(Error::TooLargeForExact {
                    what: "exact quotient distance",
                    n,
                    limit: EXACT_QUOTIENT_LIMIT,
                });
            }
            (true, 0, NormMode::Exact)
        }
        QuotientMode::Heuristic { sweeps, seed } => {
            let inner = if n <= LOCAL_SEARCH_EXACT_LIMIT {
                NormMode::Exact
            } else {
                NormMode::Heuristic { restarts: 4, seed }
            };
            (false, sweeps, inner)
        }
    };
    let start = degree_alignment(&f.degrees(), &g.degrees());
    let (distance, permutation) = minimize_over_permutations(n, exact, start, sweeps, |s| {
        d_inf_one(&f.permuted(s)?, &g, inner)
    })?;
    Ok(QuotientDistance { distance, permutation, exact })
}
