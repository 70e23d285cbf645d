use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graphon::io::{header_value, parse_header};
use crate::graphon::Permutation;
use crate::sum::{exact_sum, ExactSum};

/// Step function on `[0, 1]` with `n` equal cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("grid function needs at least one cell");
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self { values: vec![c; n.max(1)] }
    }

    /// Cell averages of `f` (4-point Gauss-Legendre per cell).
    pub fn from_fn(f: &dyn Fn(f64) -> f64, n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("grid function needs at least one cell");
        }
        Ok(Self { values: crate::graphon::kernel::project_profile(f, n) })
    }

    pub fn resolution(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        exact_sum(self.values.iter().copied()) / self.values.len() as f64
    }

    pub fn l2_norm(&self) -> f64 {
        (exact_sum(self.values.iter().map(|v| v * v)) / self.values.len() as f64).sqrt()
    }

    /// Exact L2 distance between two step functions of any resolutions.
    pub fn l2_distance(&self, other: &GridFunction) -> f64 {
        let (a, b) = (self.resolution(), other.resolution());
        // positions in units of 1/(a b)
        let (mut i, mut j, mut pos) = (0usize, 0usize, 0usize);
        let mut acc = ExactSum::new();
        while i < a && j < b {
            let end = ((i + 1) * b).min((j + 1) * a);
            let d = self.values[i] - other.values[j];
            acc.add(d * d * (end - pos) as f64);
            pos = end;
            if end == (i + 1) * b {
                i += 1;
            }
            if end == (j + 1) * a {
                j += 1;
            }
        }
        (acc.value() / (a * b) as f64).sqrt()
    }

    /// Averages over blocks of `len / n` cells.
    pub fn block_average(&self, n: usize) -> Result<Self> {
        let m = self.resolution();
        if n == 0 || !m.is_multiple_of(n) {
            return invalid(format!("{n} does not divide resolution {m}"));
        }
        let r = m / n;
        Ok(Self {
            values: self
                .values
                .chunks(r)
                .map(|c| exact_sum(c.iter().copied()) / r as f64)
                .collect(),
        })
    }

    /// `out[i] = self[sigma(i)]`.
    pub fn permuted(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.len() != self.resolution() {
            return Err(Error::ResolutionMismatch(sigma.len(), self.resolution()));
        }
        Ok(Self { values: crate::graphon::step::permute_vec(&self.values, sigma) })
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("gridfn,n,{}\n", self.resolution());
        for v in &self.values {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty gridfn file".into()))?;
        let n: usize = header_value(&parse_header(header, "gridfn")?, "n")?;
        let values = lines
            .map(|l| l.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad value '{l}'"))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != n {
            return Err(Error::Parse(format!("expected {n} values, got {}", values.len())));
        }
        Self::new(values)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}
