use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::io::{header_value, parse_header};
use crate::graphon::StepGraphon;

/// Sampled binary connectivity with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyGraph {
    n: usize,
    bits: Vec<u8>,
    directed: bool,
    alpha_bits: u64,
    seed: u64,
    source: String,
}

impl AdjacencyGraph {
    pub(crate) fn from_parts(
        n: usize,
        bits: Vec<u8>,
        directed: bool,
        alpha: f64,
        seed: u64,
        source: String,
    ) -> Self {
        debug_assert_eq!(bits.len(), n * n);
        Self { n, bits, directed, alpha_bits: alpha.to_bits(), seed, source }
    }

    /// Graph with the given 0/1 rows; `directed` is inferred from symmetry.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n || r.iter().any(|&b| b > 1)) {
            return Err(Error::InvalidArgument("adjacency rows must be square and 0/1".into()));
        }
        let bits = rows.concat();
        let directed = (0..n).any(|i| (0..n).any(|j| bits[i * n + j] != bits[j * n + i]));
        Ok(Self::from_parts(n, bits, directed, 1.0, 0, "explicit".into()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn alpha(&self) -> f64 {
        f64::from_bits(self.alpha_bits)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j] == 1
    }

    /// Number of ordered pairs `(i, j)` with `X_ij = 1`, loops included.
    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.bits
            .chunks(self.n)
            .map(|r| r.iter().map(|&b| b as usize).sum())
            .collect()
    }

    /// Empirical graphon: bits on the `n x n` grid, divided by `alpha` when
    /// `rescale` is set (bound `1/alpha`).
    pub fn embed(&self, rescale: bool) -> StepGraphon {
        let alpha = self.alpha();
        let (scale, bound) = if rescale && alpha != 1.0 { (1.0 / alpha, 1.0 / alpha) } else { (1.0, 1.0) };
        let values = self.bits.iter().map(|&b| b as f64 * scale).collect();
        StepGraphon::new(self.n, values, bound).expect("embedded values lie in [0, bound]")
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "adjacency,n,{},alpha,{},directed,{},seed,{}\n",
            self.n,
            self.alpha(),
            self.directed as u8,
            self.seed
        );
        for row in self.bits.chunks(self.n.max(1)) {
            let r: Vec<String> = row.iter().map(|b| b.to_string()).collect();
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty adjacency file".into()))?;
        let fields = parse_header(header, "adjacency")?;
        let n: usize = header_value(&fields, "n")?;
        let alpha: f64 = header_value(&fields, "alpha")?;
        let directed: u8 = header_value(&fields, "directed")?;
        let seed: u64 = header_value(&fields, "seed")?;
        if !(alpha > 0.0 && alpha <= 1.0) || directed > 1 {
            return Err(Error::Parse("adjacency header out of range".into()));
        }
        let mut bits = Vec::with_capacity(n * n);
        for line in lines {
            let row: Vec<u8> = line
                .split(',')
                .map(|v| match v.trim() {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    other => Err(Error::Parse(format!("bad adjacency entry '{other}'"))),
                })
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::Parse("adjacency row has the wrong length".into()));
            }
            bits.extend(row);
        }
        if bits.len() != n * n {
            return Err(Error::Parse(format!("expected {n} adjacency rows")));
        }
        Ok(Self::from_parts(n, bits, directed == 1, alpha, seed, "file".into()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv())?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}
