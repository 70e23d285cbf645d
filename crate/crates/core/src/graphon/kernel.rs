//! Analytic kernels, the kernel registry and cell-average projection.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::step::StepGraphon;
use crate::error::{invalid, Error, Result};

/// Order-4 Gauss-Legendre rule on `[-1, 1]`.
pub(crate) const GAUSS_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
pub(crate) const GAUSS_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Average of `f` over `[a, b]` by the 4-point rule.
pub(crate) fn gauss_average(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    GAUSS_NODES
        .iter()
        .zip(GAUSS_WEIGHTS)
        .map(|(t, w)| 0.5 * w * f(mid + half * t))
        .sum()
}

/// A kernel on `[0,1]^2` that can be evaluated pointwise.
pub trait Kernel: Sync {
    fn eval(&self, x: f64, y: f64) -> f64;
}

impl<F: Fn(f64, f64) -> f64 + Sync> Kernel for F {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self(x, y)
    }
}

/// Registry of named kernels plus user-supplied step files.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `constant:<c>`
    Constant(f64),
    /// `product`: `W(x, y) = xy`
    Product,
    /// `er:<p>`
    ErdosRenyi(f64),
    /// a step graphon, usually read from a graphon CSV file
    Step(StepGraphon),
}

impl KernelSpec {
    /// Parses a registry string; `file:<path>` or a bare path to a `.csv`
    /// reads a graphon file.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let prob = |v: &str| -> Result<f64> {
            let p: f64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad number '{v}' in kernel '{s}'")))?;
            if !(0.0..=1.0).contains(&p) {
                return invalid(format!("kernel parameter {p} outside [0, 1]"));
            }
            Ok(p)
        };
        if s == "product" {
            return Ok(Self::Product);
        }
        if let Some(v) = s.strip_prefix("constant:") {
            return Ok(Self::Constant(prob(v)?));
        }
        if let Some(v) = s.strip_prefix("er:") {
            return Ok(Self::ErdosRenyi(prob(v)?));
        }
        let path = s.strip_prefix("file:").unwrap_or(s);
        if s.starts_with("file:") || path.ends_with(".csv") {
            let g = super::io::read_graphon(&PathBuf::from(path))?;
            return Ok(Self::Step(g));
        }
        Err(Error::Parse(format!("unknown kernel '{s}'")))
    }

    /// Cell averages at resolution `n`.
    pub fn project(&self, n: usize) -> Result<StepGraphon> {
        match self {
            Self::Constant(c) | Self::ErdosRenyi(c) => project_analytic(&|_: f64, _: f64| *c, n),
            Self::Product => project_analytic(&|x: f64, y: f64| x * y, n),
            Self::Step(g) => project_step(g, n),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "constant:{c}"),
            Self::Product => write!(f, "product"),
            Self::ErdosRenyi(p) => write!(f, "er:{p}"),
            Self::Step(g) => write!(f, "step:{}", g.resolution()),
        }
    }
}

/// Cell averages of an analytic kernel by tensor Gauss-Legendre quadrature
/// (order 4 per axis per cell). Rejects kernels reporting values outside `[0, 1]`.
pub fn project_analytic(kernel: &dyn Kernel, n: usize) -> Result<StepGraphon> {
    if n == 0 {
        return invalid("projection resolution must be positive");
    }
    let h = 1.0 / n as f64;
    let rows = crate::exec::map_range(n, |i| -> Result<Vec<f64>> {
        let (xa, xb) = (i as f64 * h, (i + 1) as f64 * h);
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let (ya, yb) = (j as f64 * h, (j + 1) as f64 * h);
            let mut acc = 0.0;
            for (tx, wx) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                let x = 0.5 * (xa + xb) + 0.5 * (xb - xa) * tx;
                for (ty, wy) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                    let y = 0.5 * (ya + yb) + 0.5 * (yb - ya) * ty;
                    let v = kernel.eval(x, y);
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::KernelOutOfRange { x, y, value: v });
                    }
                    acc += 0.25 * wx * wy * v;
                }
            }
            row.push(acc.clamp(0.0, 1.0));
        }
        Ok(row)
    });
    let values = rows.into_iter().collect::<Result<Vec<_>>>()?.concat();
    StepGraphon::dense(n, values)
}

/// For each target cell, the source cells it overlaps and the overlap
/// fraction of the target cell.
fn overlap_weights(m: usize, n: usize) -> Vec<Vec<(usize, f64)>> {
    // lengths measured in units of 1/(n m)
    (0..n)
        .map(|a| {
            let (lo, hi) = (a * m, (a + 1) * m);
            let first = lo / n;
            let last = (hi - 1) / n;
            (first..=last)
                .filter_map(|k| {
                    let c = hi.min((k + 1) * n) as i64 - lo.max(k * n) as i64;
                    (c > 0).then(|| (k, c as f64 / m as f64))
                })
                .collect()
        })
        .collect()
}

/// Exact cell averages of a step graphon on another grid.
pub fn project_step(g: &StepGraphon, n: usize) -> Result<StepGraphon> {
    if n == 0 {
        return invalid("projection resolution must be positive");
    }
    let m = g.resolution();
    if m == n {
        return Ok(g.clone());
    }
    if n.is_multiple_of(m) {
        return g.refine(n);
    }
    let w = overlap_weights(m, n);
    let rows = crate::exec::map_range(n, |a| {
        (0..n)
            .map(|b| {
                let mut acc = 0.0;
                for &(k, wk) in &w[a] {
                    for &(l, wl) in &w[b] {
                        acc += wk * wl * g.get(k, l);
                    }
                }
                acc.clamp(0.0, g.bound())
            })
            .collect::<Vec<f64>>()
    });
    StepGraphon::new(n, rows.concat(), g.bound())
}

/// Cell averages of a function of one variable at resolution `n`.
pub fn project_profile(f: &dyn Fn(f64) -> f64, n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    (0..n)
        .map(|i| gauss_average(i as f64 * h, (i + 1) as f64 * h, f))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn product_kernel_cell_averages() {
        // int_0^1 x dx * int_0^1 y dy = 1/4
        let g = KernelSpec::Product.project(1).unwrap();
        assert_abs_diff_eq!(g.get(0, 0), 0.25, epsilon = 1e-15);
        // 4 * int_{Q_i} x dx * int_{Q_j} y dy with int_0^{1/2} x = 1/8, int_{1/2}^1 x = 3/8
        let g = KernelSpec::Product.project(2).unwrap();
        let want = [1.0 / 16.0, 3.0 / 16.0, 3.0 / 16.0, 9.0 / 16.0];
        for (v, w) in g.values().iter().zip(want) {
            assert_abs_diff_eq!(*v, w, epsilon = 1e-15);
        }
    }

    #[test]
    fn step_projection_is_identity_on_own_grid() {
        let g = KernelSpec::Product.project(5).unwrap();
        assert_eq!(project_step(&g, 5).unwrap(), g);
    }

    #[test]
    fn step_projection_block_average_and_general_overlap() {
        let g = StepGraphon::from_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let c = project_step(&g, 2).unwrap();
        assert_eq!(c.values(), &[0.5, 0.0, 0.0, 0.25]);
        // 4 -> 3 keeps the integral
        let t = project_step(&g, 3).unwrap();
        let total: f64 = t.values().iter().sum::<f64>() / 9.0;
        assert_abs_diff_eq!(total, 3.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn registry_parsing() {
        assert_eq!(KernelSpec::parse("er:0.3").unwrap(), KernelSpec::ErdosRenyi(0.3));
        assert_eq!(KernelSpec::parse("constant:1").unwrap(), KernelSpec::Constant(1.0));
        assert!(KernelSpec::parse("constant:1.5").is_err());
        assert!(KernelSpec::parse("wat").is_err());
        assert_eq!(KernelSpec::Product.to_string(), "product");
    }

    #[test]
    fn rejects_out_of_range_analytic_kernels() {
        let bad = |x: f64, _: f64| 2.0 * x;
        assert!(matches!(project_analytic(&bad, 2), Err(Error::KernelOutOfRange { .. })));
        assert!(project_analytic(&|_: f64, _: f64| 0.5, 0).is_err());
    }
}
