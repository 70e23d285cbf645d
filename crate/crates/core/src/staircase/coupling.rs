//! Discrete couplings with uniform marginals on the `k x k` block grid.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graphon::io::{header_value, parse_header, parse_row};
use crate::seed;
use crate::sum::exact_sum;

/// Marginal tolerance of a valid coupling.
pub const MARGINAL_TOL: f64 = 1e-12;
const SINKHORN_TARGET: f64 = 1e-13;
const SINKHORN_MAX_ITER: usize = 10_000;

/// Block masses `m_ij = nu([i/k, (i+1)/k) x [j/k, (j+1)/k))` of a coupling of
/// two uniform laws on `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CouplingRepr", into = "CouplingRepr")]
pub struct DiscreteCoupling {
    k: usize,
    masses: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CouplingRepr {
    k: usize,
    masses: Vec<f64>,
}

impl TryFrom<CouplingRepr> for DiscreteCoupling {
    type Error = Error;
    fn try_from(r: CouplingRepr) -> Result<Self> {
        DiscreteCoupling::new(r.k, r.masses)
    }
}

impl From<DiscreteCoupling> for CouplingRepr {
    fn from(c: DiscreteCoupling) -> Self {
        CouplingRepr { k: c.k, masses: c.masses }
    }
}

fn marginal_deviation(k: usize, masses: &[f64]) -> f64 {
    let delta = 1.0 / k as f64;
    let mut worst = 0.0f64;
    for i in 0..k {
        let row = exact_sum(masses[i * k..(i + 1) * k].iter().copied());
        let col = exact_sum((0..k).map(|r| masses[r * k + i]));
        worst = worst.max((row - delta).abs()).max((col - delta).abs());
    }
    worst
}

impl DiscreteCoupling {
    pub fn new(k: usize, masses: Vec<f64>) -> Result<Self> {
        if k == 0 || masses.len() != k * k {
            return invalid(format!("coupling needs k >= 1 and k^2 masses, got k = {k} with {}", masses.len()));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return invalid(format!("coupling masses must be finite and nonnegative, found {m}"));
        }
        let dev = marginal_deviation(k, &masses);
        if dev > MARGINAL_TOL {
            return invalid(format!("coupling marginals deviate from 1/{k} by {dev:e}"));
        }
        Ok(Self { k, masses })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return invalid("coupling rows must form a square array");
        }
        Self::new(k, rows.concat())
    }

    /// All mass on the diagonal blocks.
    pub fn diagonal(k: usize) -> Result<Self> {
        let mut m = vec![0.0; k * k];
        for i in 0..k {
            m[i * k + i] = 1.0 / k as f64;
        }
        Self::new(k, m)
    }

    /// Product of the two uniform laws.
    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(k, vec![1.0 / (k * k) as f64; k * k])
    }

    /// Sinkhorn projection of a matrix with iid uniform entries.
    pub fn random(k: usize, seed: u64) -> Result<Self> {
        let mut rng = seed::rng(seed);
        let raw: Vec<f64> = (0..k * k).map(|_| rng.gen::<f64>() + 1e-3).collect();
        sinkhorn(k, raw)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.masses[i * self.k + j]
    }

    /// Block masses on the coarser grid `c`, which must divide `k`.
    pub fn coarsen(&self, c: usize) -> Result<Self> {
        if c == 0 || !self.k.is_multiple_of(c) {
            return invalid(format!("cannot coarsen a {0}-grid coupling to {c} blocks", self.k));
        }
        let r = self.k / c;
        let masses = (0..c * c)
            .map(|ab| {
                let (a, b) = (ab / c, ab % c);
                exact_sum((0..r * r).map(|t| self.get(a * r + t / r, b * r + t % r)))
            })
            .collect();
        Ok(Self { k: c, masses })
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("coupling,k,{}\n", self.k);
        for i in 0..self.k {
            let row: Vec<String> = self.masses[i * self.k..(i + 1) * self.k].iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let first = lines.next().ok_or_else(|| Error::Parse("empty coupling file".into()))?;
        let header = parse_header(first, "coupling")?;
        let k: usize = header_value(&header, "k")?;
        let rows = lines.map(parse_row).collect::<Result<Vec<_>>>()?;
        if rows.len() != k {
            return Err(Error::Parse(format!("coupling header says k = {k} but found {} rows", rows.len())));
        }
        Self::from_rows(&rows)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv())?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// Alternating row/column rescaling onto the uniform-marginal polytope.
pub fn sinkhorn(k: usize, mut m: Vec<f64>) -> Result<DiscreteCoupling> {
    if k == 0 || m.len() != k * k {
        return invalid("sinkhorn needs a nonempty square array");
    }
    let delta = 1.0 / k as f64;
    let row_sum = |m: &[f64], i: usize| exact_sum(m[i * k..(i + 1) * k].iter().copied());
    let col_sum = |m: &[f64], j: usize| exact_sum((0..k).map(|r| m[r * k + j]));
    for i in 0..k {
        if row_sum(&m, i) == 0.0 || col_sum(&m, i) == 0.0 {
            return invalid(format!("row or column {i} carries no mass; marginals cannot be repaired"));
        }
    }
    for it in 0..SINKHORN_MAX_ITER {
        for i in 0..k {
            let s = delta / row_sum(&m, i);
            m[i * k..(i + 1) * k].iter_mut().for_each(|v| *v *= s);
        }
        for j in 0..k {
            let s = delta / col_sum(&m, j);
            (0..k).for_each(|r| m[r * k + j] *= s);
        }
        let dev = marginal_deviation(k, &m);
        if dev <= SINKHORN_TARGET || (it > 0 && dev <= MARGINAL_TOL && it % 64 == 63) {
            return DiscreteCoupling::new(k, m);
        }
    }
    if marginal_deviation(k, &m) <= MARGINAL_TOL {
        return DiscreteCoupling::new(k, m);
    }
    Err(Error::SinkhornStalled { tol: MARGINAL_TOL, iterations: SINKHORN_MAX_ITER })
}

/// Bins pairs into the `k x k` grid and projects the normalized counts onto
/// couplings with uniform marginals.
pub fn coupling_from_samples(pairs: &[(f64, f64)], k: usize) -> Result<DiscreteCoupling> {
    if pairs.is_empty() {
        return invalid("need at least one sample pair");
    }
    if k == 0 {
        return invalid("need at least one block");
    }
    let bin = |t: f64| -> Result<usize> {
        if !(0.0..=1.0).contains(&t) {
            return invalid(format!("sample coordinate {t} outside [0, 1]"));
        }
        Ok(((t * k as f64) as usize).min(k - 1))
    };
    let mut counts = vec![0.0; k * k];
    for &(x, y) in pairs {
        counts[bin(x)? * k + bin(y)?] += 1.0;
    }
    let total = pairs.len() as f64;
    counts.iter_mut().for_each(|c| *c /= total);
    sinkhorn(k, counts)
}
