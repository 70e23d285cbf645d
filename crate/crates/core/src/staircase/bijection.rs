//! Measure-preserving piecewise translations built from discrete couplings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::coupling::DiscreteCoupling;
use crate::error::{invalid, Error, Result};
use crate::graphon::io::{header_value, parse_header, parse_row};
use crate::sum::exact_sum;

const TILING_TOL: f64 = 1e-12;

/// The diagonal piece `{(start_x + t, start_y + t) : 0 <= t < length}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start_x: f64,
    pub start_y: f64,
    pub length: f64,
}

/// A bijection of `[0, 1)` that translates each segment's x-interval onto
/// its y-interval. Segments are kept sorted by `start_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseBijection {
    segments: Vec<Segment>,
    #[serde(skip)]
    by_y: Vec<usize>,
}

fn check_tiling(mut intervals: Vec<(f64, f64)>, axis: &str) -> Result<()> {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut end = 0.0;
    for (start, len) in intervals {
        if (start - end).abs() > TILING_TOL {
            return Err(Error::Consistency(format!(
                "{axis}-projections leave a gap or overlap at {end} (next segment starts at {start})"
            )));
        }
        end = start + len;
    }
    if (end - 1.0).abs() > TILING_TOL {
        return Err(Error::Consistency(format!("{axis}-projections end at {end}, not 1")));
    }
    Ok(())
}

impl PiecewiseBijection {
    /// Validates the tiling invariants; zero-length segments are dropped.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let mut segments: Vec<Segment> = segments.into_iter().filter(|s| s.length > 0.0).collect();
        if let Some(s) = segments.iter().find(|s| {
            !(s.start_x.is_finite() && s.start_y.is_finite() && s.length.is_finite())
                || s.start_x < -TILING_TOL
                || s.start_y < -TILING_TOL
        }) {
            return Err(Error::Consistency(format!("malformed segment {s:?}")));
        }
        let total = exact_sum(segments.iter().map(|s| s.length));
        if (total - 1.0).abs() > TILING_TOL {
            return Err(Error::Consistency(format!("segment lengths sum to {total}, not 1")));
        }
        check_tiling(segments.iter().map(|s| (s.start_x, s.length)).collect(), "x")?;
        check_tiling(segments.iter().map(|s| (s.start_y, s.length)).collect(), "y")?;
        segments.sort_by(|a, b| a.start_x.total_cmp(&b.start_x));
        let mut by_y: Vec<usize> = (0..segments.len()).collect();
        by_y.sort_by(|&a, &b| segments[a].start_y.total_cmp(&segments[b].start_y));
        Ok(Self { segments, by_y })
    }

    pub fn identity() -> Self {
        Self::new(vec![Segment { start_x: 0.0, start_y: 0.0, length: 1.0 }]).expect("identity is valid")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    fn covering(&self, x: f64) -> Result<&Segment> {
        let idx = self.segments.partition_point(|s| s.start_x <= x);
        if idx == 0 {
            return Err(Error::Consistency(format!("{x} is not covered by any segment")));
        }
        let s = &self.segments[idx - 1];
        if x - (s.start_x + s.length) > TILING_TOL {
            return Err(Error::Consistency(format!("{x} is not covered by any segment")));
        }
        Ok(s)
    }

    /// `theta(x)` for `x` in `[0, 1)`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&x) {
            return invalid(format!("{x} lies outside [0, 1)"));
        }
        let s = self.covering(x)?;
        Ok((s.start_y + (x - s.start_x)).clamp(0.0, 1.0 - f64::EPSILON / 2.0))
    }

    /// `theta^{-1}(y)` for `y` in `[0, 1)`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&y) {
            return invalid(format!("{y} lies outside [0, 1)"));
        }
        let idx = self.by_y.partition_point(|&i| self.segments[i].start_y <= y);
        if idx == 0 {
            return Err(Error::Consistency(format!("{y} is not in the image")));
        }
        let s = &self.segments[self.by_y[idx - 1]];
        Ok((s.start_x + (y - s.start_y)).clamp(0.0, 1.0 - f64::EPSILON / 2.0))
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("bijection,segments,{}\n", self.segments.len());
        for s in &self.segments {
            out.push_str(&format!("{},{},{}\n", s.start_x, s.start_y, s.length));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let first = lines.next().ok_or_else(|| Error::Parse("empty bijection file".into()))?;
        let header = parse_header(first, "bijection")?;
        let count: usize = header_value(&header, "segments")?;
        let mut segments = Vec::with_capacity(count);
        for line in lines {
            let row = parse_row(line)?;
            if row.len() != 3 {
                return Err(Error::Parse(format!("bijection rows need 3 fields, got '{line}'")));
            }
            segments.push(Segment { start_x: row[0], start_y: row[1], length: row[2] });
        }
        if segments.len() != count {
            return Err(Error::Parse(format!("header says {count} segments, found {}", segments.len())));
        }
        Self::new(segments).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv())?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// The staircase bijection of a discrete coupling.
///
/// Block `(i, j)` contributes one segment of length `m_ij`. Inside x-block
/// `i` the segments are laid out in order of `j`, inside y-block `j` in order
/// of `i`, so each segment stays within its own block and both projections
/// tile `[0, 1)`.
pub fn staircase_bijection(nu: &DiscreteCoupling) -> Result<PiecewiseBijection> {
    let k = nu.k();
    let corner = |i: usize| i as f64 / k as f64;
    let mut col_used = vec![0.0f64; k];
    let mut segments = Vec::with_capacity(k * k);
    for i in 0..k {
        let mut row_used = 0.0;
        for (j, used) in col_used.iter_mut().enumerate() {
            let m = nu.get(i, j);
            if m > 0.0 {
                segments.push(Segment {
                    start_x: corner(i) + row_used,
                    start_y: corner(j) + *used,
                    length: m,
                });
            }
            row_used += m;
            *used += m;
        }
    }
    PiecewiseBijection::new(segments)
}

/// Exact block masses `nu_theta(T_a x T_b)` of the coupling induced by
/// `theta` on the `k x k` grid.
pub fn pushforward_blocks(theta: &PiecewiseBijection, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return invalid("need at least one block");
    }
    let kf = k as f64;
    let block = |t: f64| ((t * kf).floor().max(0.0) as usize).min(k - 1);
    let mut pieces: Vec<Vec<f64>> = vec![Vec::new(); k * k];
    for s in theta.segments() {
        let mut cuts = vec![0.0, s.length];
        for (start, _) in [(s.start_x, 0), (s.start_y, 1)] {
            let first = (start * kf).floor() as i64 + 1;
            let mut c = first;
            loop {
                let t = c as f64 / kf - start;
                if t >= s.length {
                    break;
                }
                if t > 0.0 {
                    cuts.push(t);
                }
                c += 1;
            }
        }
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            let len = w[1] - w[0];
            if len <= 0.0 {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            let (a, b) = (block(s.start_x + mid), block(s.start_y + mid));
            pieces[a * k + b].push(len);
        }
    }
    Ok(pieces.into_iter().map(exact_sum).collect())
}
