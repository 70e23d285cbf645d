//! Penalized search for the cheapest graphon that drives an observable of the
//! continuum dynamics to a target value.
//!
//! Minimizes `upsilon(V, W) + lambda (Phi(V) - target)^2` over step graphons
//! `V` at a coarse resolution `r`, clipped to `[eps, 1 - eps]`, where `Phi`
//! simulates the Galerkin system at resolution `m` (a multiple of `r`) and
//! evaluates the observable. Coordinate descent with central differences and
//! backtracking; the result is an upper bound on the constrained rate.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::rate::upsilon;
use crate::dynamics::{simulate, CouplingSpec, Observable, SimConfig, Trajectory};
use crate::error::{invalid, Result};
use crate::graphon::{project_step, StepGraphon};
use crate::random_graphs::GridFunction;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynRateSearch {
    /// Resolution `r` of the searched graphon.
    pub resolution: usize,
    /// Simulation resolution `m`, a multiple of `r`.
    pub sim_resolution: usize,
    pub penalty: f64,
    pub clip: f64,
    pub max_iterations: usize,
    pub step: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for DynRateSearch {
    fn default() -> Self {
        Self {
            resolution: 1,
            sim_resolution: 8,
            penalty: 100.0,
            clip: 1e-3,
            max_iterations: 200,
            step: 0.05,
            tol: 1e-7,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DynRateResult {
    pub best_v: StepGraphon,
    pub upsilon: f64,
    pub observable: f64,
    /// `upsilon + lambda (observable - target)^2`
    pub cost: f64,
    pub trajectory: Trajectory,
    pub iterations: usize,
    pub converged: bool,
}

struct Problem<'a> {
    w: StepGraphon,
    g: &'a GridFunction,
    params: Option<&'a GridFunction>,
    coupling: CouplingSpec,
    sim: SimConfig,
    observable: Observable,
    target: f64,
    search: DynRateSearch,
}

impl Problem<'_> {
    fn graphon(&self, v: &[f64]) -> Result<StepGraphon> {
        StepGraphon::dense(self.search.resolution, v.to_vec())
    }

    fn eval(&self, v: &[f64]) -> Result<(f64, f64, f64, Trajectory)> {
        let vg = self.graphon(v)?;
        let ups = upsilon(&vg, &self.w)?.value;
        let fine = vg.refine(self.search.sim_resolution)?;
        let traj = simulate(&fine, self.g, self.params, self.coupling, self.sim)?;
        let obs = self.observable.eval(&traj);
        let cost = ups + self.search.penalty * (obs - self.target).powi(2);
        Ok((cost, ups, obs, traj))
    }

    fn cost(&self, v: &[f64]) -> Result<f64> {
        Ok(self.eval(v)?.0)
    }
}

/// Runs the penalized search from the clipped projection of `W`.
#[allow(clippy::too_many_arguments)]
pub fn dynamical_rate_search(
    w: &StepGraphon,
    g: &GridFunction,
    params: Option<&GridFunction>,
    coupling: CouplingSpec,
    sim: SimConfig,
    observable: Observable,
    target: f64,
    search: DynRateSearch,
) -> Result<DynRateResult> {
    let (r, m) = (search.resolution, search.sim_resolution);
    if r == 0 || m % r != 0 {
        return invalid(format!("simulation resolution {m} must be a positive multiple of {r}"));
    }
    if g.resolution() != m {
        return Err(crate::Error::ResolutionMismatch(m, g.resolution()));
    }
    if !(search.clip > 0.0 && search.clip < 0.5) {
        return invalid(format!("clip must lie in (0, 1/2), got {}", search.clip));
    }
    if !(search.penalty >= 0.0) || !(search.step > 0.0) {
        return invalid("penalty must be nonnegative and step positive");
    }
    if !w.is_dense() {
        return invalid("W must be a dense graphon");
    }
    let wr = project_step(w, r)?;
    if wr.values().iter().any(|&x| x <= 0.0 || x >= 1.0) {
        return invalid("projected W must lie strictly inside (0, 1); clamp it first");
    }
    let problem = Problem { w: wr.clone(), g, params, coupling, sim, observable, target, search };
    let (lo, hi) = (search.clip, 1.0 - search.clip);
    let clip = |x: f64| x.clamp(lo, hi);

    let mut v: Vec<f64> = wr.values().iter().map(|&x| clip(x)).collect();
    let mut cost = problem.cost(&v)?;
    let mut rng = seed::rng(search.seed);
    let mut order: Vec<usize> = (0..r * r).collect();
    let fd = 1e-5;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < search.max_iterations {
        iterations += 1;
        order.shuffle(&mut rng);
        let mut max_move = 0.0f64;
        let start_cost = cost;
        for &c in &order {
            let x = v[c];
            let (a, b) = (clip(x - fd), clip(x + fd));
            if a == b {
                continue;
            }
            let mut probe = v.clone();
            probe[c] = b;
            let cb = problem.cost(&probe)?;
            probe[c] = a;
            let ca = problem.cost(&probe)?;
            let grad = (cb - ca) / (b - a);
            if grad == 0.0 || !grad.is_finite() {
                continue;
            }
            let mut step = search.step;
            for _ in 0..40 {
                let candidate = clip(x - step * grad);
                if candidate == x {
                    break;
                }
                probe[c] = candidate;
                let cc = problem.cost(&probe)?;
                if cc < cost {
                    max_move = max_move.max((candidate - x).abs());
                    v[c] = candidate;
                    cost = cc;
                    break;
                }
                step *= 0.5;
            }
        }
        if max_move < search.tol || start_cost - cost <= 1e-14 * start_cost.abs().max(1e-300) {
            converged = true;
            break;
        }
    }

    let (cost, ups, obs, trajectory) = problem.eval(&v)?;
    Ok(DynRateResult {
        best_v: problem.graphon(&v)?,
        upsilon: ups,
        observable: obs,
        cost,
        trajectory,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Interaction, Intrinsic};

    fn setup() -> (StepGraphon, GridFunction, CouplingSpec, SimConfig) {
        let w = StepGraphon::constant(1, 0.5).unwrap();
        let g = GridFunction::from_fn(&|x| 0.3 * x, 4).unwrap();
        let coupling = CouplingSpec::new(Intrinsic::Zero, Interaction::Kuramoto);
        (w, g, coupling, SimConfig::new(1.0, 0.005, 200))
    }

    #[test]
    fn typical_target_costs_nothing() {
        let (w, g, coupling, sim) = setup();
        let search = DynRateSearch { sim_resolution: 4, ..Default::default() };
        let typical = simulate(&w.refine(4).unwrap(), &g, None, coupling, sim).unwrap();
        let target = Observable::OrderParameter.eval(&typical);
        let res = dynamical_rate_search(&w, &g, None, coupling, sim, Observable::OrderParameter, target, search)
            .unwrap();
        assert!(res.cost < 1e-10, "cost {}", res.cost);
        assert!((res.best_v.get(0, 0) - 0.5).abs() < 1e-3);
        assert!(res.converged);
    }

    #[test]
    fn rejects_bad_resolutions() {
        let (w, g, coupling, sim) = setup();
        let search = DynRateSearch { resolution: 3, sim_resolution: 4, ..Default::default() };
        assert!(dynamical_rate_search(&w, &g, None, coupling, sim, Observable::OrderParameter, 0.9, search).is_err());
    }
}
