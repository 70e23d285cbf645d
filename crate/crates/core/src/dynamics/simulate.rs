//! Fixed-step RK4 for `u_i' = f(u_i, xi_i, t) + (1/n) sum_j K_ij D(u_i, u_j)`.
//!
//! The kernel `K` is any step graphon on the node grid: an embedded
//! adjacency matrix gives the particle system, a projected graphon gives the
//! Galerkin scheme for the continuum limit, and a rescaled sparse embedding
//! gives the `(alpha n)^{-1}` normalization. The interaction sum for each
//! node is accumulated in fixed point, so relabeling nodes relabels the
//! trajectory bit for bit.

use serde::{Deserialize, Serialize};

use super::coupling::CouplingSpec;
use super::trajectory::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::graphon::{KernelSpec, StepGraphon};
use crate::random_graphs::GridFunction;
use crate::sum::FixedSum;
use crate::exec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt: f64,
    pub save_every: usize,
}

impl SimConfig {
    pub fn new(t_end: f64, dt: f64, save_every: usize) -> Self {
        Self { t_end, dt, save_every }
    }

    fn steps(&self) -> Result<usize> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return invalid(format!("final time {} must be positive", self.t_end));
        }
        if !(self.dt > 0.0) {
            return invalid(format!("time step {} must be positive", self.dt));
        }
        if self.save_every == 0 {
            return invalid("save_every must be at least 1");
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end || steps < 1.0 {
            return invalid(format!("T = {} is not a multiple of dt = {}", self.t_end, self.dt));
        }
        Ok(steps as usize)
    }
}

struct System<'a> {
    kernel: &'a StepGraphon,
    params: Option<&'a [f64]>,
    coupling: CouplingSpec,
}

impl System<'_> {
    fn rhs(&self, t: f64, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        let inv_n = 1.0 / n as f64;
        let (f, d) = (self.coupling.f, self.coupling.d);
        exec::for_each_indexed(out, |i, o| {
            let ui = u[i];
            let mut acc = FixedSum::new();
            for (&k, &uj) in self.kernel.row(i).iter().zip(u) {
                if k != 0.0 {
                    acc.add(k * d.eval(ui, uj));
                }
            }
            let xi = self.params.map_or(0.0, |p| p[i]);
            *o = f.eval(ui, xi, t) + inv_n * acc.value();
        });
    }
}

/// Integrates the networked system driven by `kernel` from `g`.
pub fn simulate(
    kernel: &StepGraphon,
    g: &GridFunction,
    params: Option<&GridFunction>,
    coupling: CouplingSpec,
    cfg: SimConfig,
) -> Result<Trajectory> {
    let n = kernel.resolution();
    if g.resolution() != n {
        return Err(Error::ResolutionMismatch(n, g.resolution()));
    }
    if let Some(p) = params {
        if p.resolution() != n {
            return Err(Error::ResolutionMismatch(n, p.resolution()));
        }
        let bound = coupling.f.bound();
        if coupling.f.needs_parameters() && p.sup_norm() > bound {
            return invalid(format!("parameters reach {} above the declared bound {bound}", p.sup_norm()));
        }
    } else if coupling.f.needs_parameters() {
        return invalid(format!("intrinsic dynamics '{}' needs node parameters", coupling.f));
    }
    let steps = cfg.steps()?;
    let limit = coupling.max_dt(kernel.bound());
    if cfg.dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt: cfg.dt, limit });
    }

    let sys = System { kernel, params: params.map(|p| p.values()), coupling };
    let dt = cfg.dt;
    let mut u = g.values().to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut times = vec![0.0];
    let mut states = vec![g.clone()];

    for s in 0..steps {
        let t = s as f64 * dt;
        sys.rhs(t, &u, &mut k1);
        for i in 0..n {
            tmp[i] = u[i] + 0.5 * dt * k1[i];
        }
        sys.rhs(t + 0.5 * dt, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = u[i] + 0.5 * dt * k2[i];
        }
        sys.rhs(t + 0.5 * dt, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = u[i] + dt * k3[i];
        }
        sys.rhs(t + dt, &tmp, &mut k4);
        for i in 0..n {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t_next = (s + 1) as f64 * dt;
        if let Some((node, &value)) = u.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteState { t: t_next, node, value });
        }
        if (s + 1) % cfg.save_every == 0 || s + 1 == steps {
            times.push(t_next);
            states.push(GridFunction::new(u.clone())?);
        }
    }
    Ok(Trajectory {
        n,
        times,
        states,
        dt,
        save_every: cfg.save_every,
        coupling: coupling.id(),
        kernel: format!("step:{n}"),
        kernel_bound: kernel.bound(),
    })
}

/// Galerkin approximation of the continuum equation at resolution `m`:
/// projects the kernel and the initial profile onto `m` cells and integrates.
pub fn solve_continuum(
    kernel: &KernelSpec,
    g: &dyn Fn(f64) -> f64,
    params: Option<&GridFunction>,
    coupling: CouplingSpec,
    m: usize,
    cfg: SimConfig,
) -> Result<Trajectory> {
    let w = kernel.project(m)?;
    let g = GridFunction::from_fn(g, m)?;
    let mut traj = simulate(&w, &g, params, coupling, cfg)?;
    traj.kernel = kernel.to_string();
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundCheck {
    Holds,
    /// First violating snapshot.
    Violated { t: f64, node: usize, value: f64, bound: f64 },
    /// The interaction has no finite sup bound.
    Exempt,
}

/// Checks `|u(t, x)| <= ||g||_inf + (bound_f + B bound_D) t` on every snapshot.
pub fn a_priori_bound_check(traj: &Trajectory, coupling: CouplingSpec, g: &GridFunction) -> BoundCheck {
    let rate = coupling.f.bound() + traj.kernel_bound * coupling.d.bound();
    if !rate.is_finite() {
        return BoundCheck::Exempt;
    }
    let g_sup = g.sup_norm();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let bound = g_sup + rate * t;
        let tol = 1e-12 * (1.0 + bound);
        if let Some((node, &value)) = s.values().iter().enumerate().find(|(_, v)| v.abs() > bound + tol) {
            return BoundCheck::Violated { t: *t, node, value, bound };
        }
    }
    BoundCheck::Holds
}
