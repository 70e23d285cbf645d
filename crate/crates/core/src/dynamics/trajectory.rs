use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::Permutation;
use crate::random_graphs::GridFunction;

/// Saved states of a simulation, `states[k]` at `times[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n: usize,
    pub times: Vec<f64>,
    pub states: Vec<GridFunction>,
    pub dt: f64,
    pub save_every: usize,
    pub coupling: String,
    pub kernel: String,
    /// Upper bound of the kernel the system was driven by.
    pub kernel_bound: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &GridFunction {
        self.states.last().expect("trajectory has an initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has an initial time")
    }

    /// Relabels nodes in every snapshot.
    pub fn permuted(&self, sigma: &Permutation) -> Result<Self> {
        let states = self
            .states
            .iter()
            .map(|s| s.permuted(sigma))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { states, ..self.clone() })
    }

    /// CSV with header `trajectory,n,<n>,dt,<dt>,save_every,<k>` and rows
    /// `t,v_1,...,v_n`. Phases are reduced mod 1 when `wrap_phases` is set.
    pub fn to_csv(&self, wrap_phases: bool) -> String {
        let mut out = format!("trajectory,n,{},dt,{},save_every,{}\n", self.n, self.dt, self.save_every);
        for (t, s) in self.times.iter().zip(&self.states) {
            out.push_str(&t.to_string());
            for v in s.values() {
                let v = if wrap_phases { v.rem_euclid(1.0) } else { *v };
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// `sup_t ||u(t) - v(t)||_{L2}` over the saved times.
pub fn trajectory_distance(u: &Trajectory, v: &Trajectory) -> Result<f64> {
    if u.times.len() != v.times.len()
        || u.times.iter().zip(&v.times).any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + a.abs()))
    {
        return Err(Error::TimeGridMismatch);
    }
    Ok(u.states
        .iter()
        .zip(&v.states)
        .map(|(a, b)| a.l2_distance(b))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientTrajectoryDistance {
    /// Exact minimum for `n <= 8`, otherwise an upper bound.
    pub distance: f64,
    pub permutation: Permutation,
    pub exact: bool,
}

/// Minimizes `trajectory_distance(u_sigma, v)` over node relabelings applied
/// to all snapshots at once. Both trajectories must share a resolution.
pub fn quotient_trajectory_distance(
    u: &Trajectory,
    v: &Trajectory,
    sweeps: usize,
) -> Result<QuotientTrajectoryDistance> {
    if u.n != v.n {
        return Err(Error::ResolutionMismatch(u.n, v.n));
    }
    trajectory_distance(u, v)?;
    let n = u.n;
    let exact = n <= crate::graphon::quotient::EXACT_QUOTIENT_LIMIT;
    let signature = |t: &Trajectory| -> Vec<f64> {
        (0..n)
            .map(|i| crate::sum::exact_sum(t.states.iter().map(|s| s.values()[i])))
            .collect()
    };
    let start = crate::graphon::quotient::degree_alignment(&signature(u), &signature(v));
    let (distance, permutation) =
        crate::graphon::quotient::minimize_over_permutations(n, exact, start, sweeps, |s| {
            trajectory_distance(&u.permuted(s)?, v)
        })?;
    Ok(QuotientTrajectoryDistance { distance, permutation, exact })
}
