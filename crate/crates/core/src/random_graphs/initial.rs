//! Initial data and node parameters: deterministic profiles, random
//! Lipschitz paths and convolved i.i.d. noise, each with its coarse-grained
//! cell averages.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use super::gridfn::GridFunction;
use crate::error::{invalid, Error, Result};
use crate::seed;

/// Fine cells per coarse cell for deterministic and Lipschitz data (at least).
const MIN_FINE_FACTOR: usize = 16;

/// Deterministic profile `g: [0,1] -> R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `constant:<c>`
    Constant(f64),
    /// `linear`: `g(x) = x`
    Linear,
    /// `affine:<a>,<b>`: `g(x) = a + b x`
    Affine(f64, f64),
    /// `cos:<k>`: `g(x) = cos(2 pi k x)`
    Cos(f64),
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant(c) => c,
            Profile::Linear => x,
            Profile::Affine(a, b) => a + b * x,
            Profile::Cos(k) => (2.0 * std::f64::consts::PI * k * x).cos(),
        }
    }
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse(format!("bad number '{s}'")))
}

impl FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "linear" {
            return Ok(Profile::Linear);
        }
        if let Some(v) = s.strip_prefix("constant:") {
            return Ok(Profile::Constant(parse_num(v)?));
        }
        if let Some(v) = s.strip_prefix("cos:") {
            return Ok(Profile::Cos(parse_num(v)?));
        }
        if let Some(v) = s.strip_prefix("affine:") {
            let (a, b) = v.split_once(',').ok_or_else(|| Error::Parse(format!("bad profile '{s}'")))?;
            return Ok(Profile::Affine(parse_num(a)?, parse_num(b)?));
        }
        Err(Error::Parse(format!("unknown profile '{s}'")))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "constant:{c}"),
            Profile::Linear => write!(f, "linear"),
            Profile::Affine(a, b) => write!(f, "affine:{a},{b}"),
            Profile::Cos(k) => write!(f, "cos:{k}"),
        }
    }
}

/// Probability law with finitely many atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteLaw {
    atoms: Vec<f64>,
    probs: Vec<f64>,
}

impl FiniteLaw {
    pub fn new(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != probs.len() {
            return invalid("law needs matching, nonempty atoms and probabilities");
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return invalid("law atoms must be finite (bounded support)");
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return invalid("probabilities must be nonnegative");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return invalid(format!("probabilities sum to {total}, not 1"));
        }
        let probs = probs.iter().map(|p| p / total).collect();
        Ok(Self { atoms, probs })
    }

    pub fn point(w: f64) -> Result<Self> {
        Self::new(vec![w], vec![1.0])
    }

    /// `Bernoulli(p)` on `{0, 1}`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![1.0 - p, p])
    }

    pub fn uniform(atoms: Vec<f64>) -> Result<Self> {
        let k = atoms.len();
        Self::new(atoms, vec![1.0 / k as f64; k])
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().zip(&self.probs).map(|(a, p)| a * p).sum()
    }

    /// Smallest `M` with support in `[-M, M]`.
    pub fn support_bound(&self) -> f64 {
        self.atoms.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (a, p) in self.atoms.iter().zip(&self.probs) {
            acc += p;
            if u < acc {
                return *a;
            }
        }
        *self.atoms.last().expect("nonempty law")
    }
}

impl FromStr for FiniteLaw {
    type Err = Error;
    /// `point:<w>`, `bernoulli:<p>`, `uniform:<a1>,<a2>,...` or
    /// `discrete:<a1>@<p1>,<a2>@<p2>,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(v) = s.strip_prefix("point:") {
            return Self::point(parse_num(v)?);
        }
        if let Some(v) = s.strip_prefix("bernoulli:") {
            return Self::bernoulli(parse_num(v)?);
        }
        if let Some(v) = s.strip_prefix("uniform:") {
            return Self::uniform(v.split(',').map(parse_num).collect::<Result<_>>()?);
        }
        if let Some(v) = s.strip_prefix("discrete:") {
            let mut atoms = Vec::new();
            let mut probs = Vec::new();
            for part in v.split(',') {
                let (a, p) = part
                    .split_once('@')
                    .ok_or_else(|| Error::Parse(format!("bad atom '{part}'")))?;
                atoms.push(parse_num(a)?);
                probs.push(parse_num(p)?);
            }
            return Self::new(atoms, probs);
        }
        Err(Error::Parse(format!("unknown law '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialKind {
    Deterministic(Profile),
    /// Random `lipschitz`-Lipschitz path (reflected random walk in `[-1, 1]`).
    Lipschitz { lipschitz: f64, seed: u64 },
    /// `n^2` i.i.d. draws from `law`, periodically convolved with a bump of
    /// half-width `rho`.
    Convolved { law: FiniteLaw, rho: f64, seed: u64 },
}

/// Fine-grid initial data and its cell averages at the working resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub fine: GridFunction,
    pub coarse: GridFunction,
}

pub fn make_initial_condition(kind: &InitialKind, n: usize) -> Result<InitialCondition> {
    if n == 0 {
        return invalid("resolution must be positive");
    }
    let fine = match kind {
        InitialKind::Deterministic(p) => {
            GridFunction::from_fn(&|x| p.eval(x), n * n.max(MIN_FINE_FACTOR))?
        }
        InitialKind::Lipschitz { lipschitz, seed } => {
            lipschitz_path(*lipschitz, n * n.max(MIN_FINE_FACTOR), *seed)?
        }
        InitialKind::Convolved { law, rho, seed } => convolved_noise(law, *rho, n * n, *seed)?,
    };
    let coarse = fine.block_average(n)?;
    Ok(InitialCondition { fine, coarse })
}

/// Heterogeneous node parameters: the coarse part of convolved noise.
pub fn make_parameters(law: &FiniteLaw, n: usize, rho: f64, seed: u64) -> Result<GridFunction> {
    let kind = InitialKind::Convolved { law: law.clone(), rho, seed };
    Ok(make_initial_condition(&kind, n)?.coarse)
}

/// Cell averages of a piecewise linear path whose slopes are uniform in
/// `[-M, M]`, reflected at `+-1`.
fn lipschitz_path(m: f64, cells: usize, seed: u64) -> Result<GridFunction> {
    if !(m.is_finite() && m >= 0.0) {
        return invalid(format!("Lipschitz constant {m} must be finite and nonnegative"));
    }
    let mut rng = seed::rng(seed);
    let h = 1.0 / cells as f64;
    let mut p: f64 = rng.gen_range(-1.0..=1.0);
    let mut values = Vec::with_capacity(cells);
    for _ in 0..cells {
        let slope = if m > 0.0 { rng.gen_range(-m..=m) } else { 0.0 };
        let mut q = p + slope * h;
        // reflecting keeps |dq| = |slope| h
        while !(-1.0..=1.0).contains(&q) {
            q = if q > 1.0 { 2.0 - q } else { -2.0 - q };
        }
        let crosses = (p + slope * h - q).abs() > 0.0;
        // average of a reflected segment: integrate the two linear pieces
        let avg = if crosses { reflected_average(p, slope * h) } else { 0.5 * (p + q) };
        values.push(avg);
        p = q;
    }
    GridFunction::new(values)
}

/// Mean over `t in [0,1]` of the reflection of `p + t d` into `[-1, 1]`.
fn reflected_average(p: f64, d: f64) -> f64 {
    const STEPS: usize = 64;
    let reflect = |mut q: f64| {
        while !(-1.0..=1.0).contains(&q) {
            q = if q > 1.0 { 2.0 - q } else { -2.0 - q };
        }
        q
    };
    (0..STEPS)
        .map(|k| reflect(p + d * (k as f64 + 0.5) / STEPS as f64))
        .sum::<f64>()
        / STEPS as f64
}

/// Standard smooth bump `exp(-1/(1-t^2))` on `|t| < 1`.
fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn convolved_noise(law: &FiniteLaw, rho: f64, cells: usize, seed: u64) -> Result<GridFunction> {
    if !(rho > 0.0 && rho.is_finite()) {
        return invalid(format!("kernel half-width {rho} must be positive"));
    }
    let mut rng = seed::rng(seed);
    let h: Vec<f64> = (0..cells).map(|_| law.sample(&mut rng)).collect();
    // discrete weights w_d on offsets |d| < rho * cells, normalized to unit mass
    let reach = ((rho * cells as f64).ceil() as usize).min(cells / 2);
    let mut weights = vec![0.0; cells];
    let scale = rho * cells as f64;
    for d in 0..=reach {
        let w = bump(d as f64 / scale);
        weights[d] += w;
        if d > 0 {
            weights[(cells - d) % cells] += w;
        }
    }
    if weights.iter().all(|&w| w == 0.0) {
        weights[0] = 1.0;
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    GridFunction::new(circular_convolution(&h, &weights))
}

/// `out[i] = sum_d w[d] h[(i + d) mod N]` via FFT (the weights are symmetric).
fn circular_convolution(h: &[f64], w: &[f64]) -> Vec<f64> {
    let n = h.len();
    if n == 1 {
        return vec![h[0] * w[0]];
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut a: Vec<Complex<f64>> = h.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut b: Vec<Complex<f64>> = w.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    a.iter().map(|c| c.re / n as f64).collect()
}
