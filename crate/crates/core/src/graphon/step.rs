use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest per-axis resolution a common refinement may reach.
pub const REFINEMENT_CAP: usize = 2048;

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least common multiple of two resolutions, subject to [`REFINEMENT_CAP`].
pub fn common_refinement(a: usize, b: usize) -> Result<usize> {
    if a == 0 || b == 0 {
        return invalid("resolution must be positive");
    }
    let lcm = a / gcd(a, b) * b;
    if lcm > REFINEMENT_CAP {
        return Err(Error::RefinementTooLarge { a, b, lcm, cap: REFINEMENT_CAP });
    }
    Ok(lcm)
}

/// Piecewise-constant kernel on the uniform `n x n` grid of the unit square.
///
/// Cell `(i, j)` is `[i/n, (i+1)/n) x [j/n, (j+1)/n)` and values are stored
/// row-major. Every value lies in `[0, bound]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepGraphon {
    n: usize,
    values: Vec<f64>,
    bound: f64,
}

impl StepGraphon {
    pub fn new(n: usize, values: Vec<f64>, bound: f64) -> Result<Self> {
        if n == 0 {
            return invalid("graphon resolution must be positive");
        }
        if values.len() != n * n {
            return invalid(format!("expected {} values, got {}", n * n, values.len()));
        }
        if !(bound.is_finite() && bound > 0.0) {
            return invalid(format!("bound must be positive and finite, got {bound}"));
        }
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && **v <= bound))
        {
            return invalid(format!(
                "value {v} at cell ({}, {}) outside [0, {bound}]",
                k / n,
                k % n
            ));
        }
        Ok(Self { n, values, bound })
    }

    /// Dense graphon (`bound = 1`).
    pub fn dense(n: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(n, values, 1.0)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("graphon rows must form a square array");
        }
        Self::dense(n, rows.concat())
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, vec![c; n * n], c.max(1.0))
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_dense(&self) -> bool {
        self.bound == 1.0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Value at a point of `[0,1]^2` (the right and top edges map to the last cell).
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let cell = |t: f64| ((t * self.n as f64) as usize).min(self.n - 1);
        self.get(cell(x), cell(y))
    }

    /// Same function on a finer grid; `m` must be a multiple of the resolution.
    pub fn refine(&self, m: usize) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(self.n) {
            return invalid(format!("{m} is not a refinement of {}", self.n));
        }
        let r = m / self.n;
        let mut values = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                values.push(self.get(i / r, j / r));
            }
        }
        Ok(Self { n: m, values, bound: self.bound })
    }

    /// `f_sigma(i, j) = f(sigma(i), sigma(j))`.
    pub fn permuted(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.len() != self.n {
            return Err(Error::ResolutionMismatch(sigma.len(), self.n));
        }
        Ok(Self {
            n: self.n,
            values: permute_square(&self.values, self.n, sigma),
            bound: self.bound,
        })
    }

    /// `self - other` on the least common refinement.
    pub fn difference(&self, other: &StepGraphon) -> Result<SignedStepKernel> {
        let m = common_refinement(self.n, other.n)?;
        let a = if m == self.n { self.clone() } else { self.refine(m)? };
        let b = if m == other.n { other.clone() } else { other.refine(m)? };
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
        Ok(SignedStepKernel { n: m, values })
    }

    /// Row plus column sums per node, used to seed relabeling searches.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| (0..self.n).map(|j| self.get(k, j) + self.get(j, k)).sum())
            .collect()
    }

    /// Clamp into `[delta, 1 - delta]` (requires a dense graphon).
    pub fn clamped(&self, delta: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&delta) {
            return invalid(format!("clamp width {delta} must lie in [0, 1/2)"));
        }
        let values = self
            .values
            .iter()
            .map(|v| v.max(delta).min(1.0 - delta))
            .collect();
        Self::dense(self.n, values)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

fn permute_square(values: &[f64], n: usize, sigma: &Permutation) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let si = sigma.apply(i);
        for j in 0..n {
            out.push(values[si * n + sigma.apply(j)]);
        }
    }
    out
}

/// Difference of two step graphons; values in `[-B, B]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedStepKernel {
    n: usize,
    values: Vec<f64>,
}

impl SignedStepKernel {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || values.len() != n * n {
            return invalid("signed kernel needs n > 0 and n*n values");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("signed kernel values must be finite");
        }
        Ok(Self { n, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("kernel rows must form a square array");
        }
        Self::new(n, rows.concat())
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, values: vec![0.0; n * n] }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn permuted(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.len() != self.n {
            return Err(Error::ResolutionMismatch(sigma.len(), self.n));
        }
        Ok(Self { n: self.n, values: permute_square(&self.values, self.n, sigma) })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(1/n^2) sum_ij |K_ij|`, an upper bound on the infinity-to-one norm.
    pub fn l1_norm(&self) -> f64 {
        crate::sum::exact_sum(self.values.iter().map(|v| v.abs())) / (self.n * self.n) as f64
    }
}

impl From<&StepGraphon> for SignedStepKernel {
    fn from(g: &StepGraphon) -> Self {
        Self { n: g.n, values: g.values.clone() }
    }
}

/// Bijection of `{0, .., n-1}`; relabels cells of a step function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &k in &map {
            if k >= n || std::mem::replace(&mut seen[k], true) {
                return invalid(format!("{map:?} is not a bijection"));
            }
        }
        Ok(Self(map))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &k) in self.0.iter().enumerate() {
            inv[k] = i;
        }
        Self(inv)
    }

    /// `(self . other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self(other.0.iter().map(|&k| self.0[k]).collect())
    }

    pub(crate) fn swap(&mut self, a: usize, b: usize) {
        self.0.swap(a, b);
    }

    /// All permutations of `n` elements in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Self(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

/// Applies `sigma` to a vector of per-cell values: `out[i] = v[sigma(i)]`.
pub fn permute_vec<T: Copy>(v: &[T], sigma: &Permutation) -> Vec<T> {
    (0..v.len()).map(|i| v[sigma.apply(i)]).collect()
}
