//! Infinity-to-one and cut norms of signed step kernels.
//!
//! Both are suprema of a bilinear form, so for step kernels they are attained
//! at vertices: sign vectors for the infinity-to-one norm, indicator vectors
//! for the cut norm. Exact mode enumerates the vertices of one side in Gray
//! code order and picks the other side in closed form; heuristic mode runs
//! alternating maximization and reports the best feasible value, i.e. a
//! certified lower bound.
//!
//! All arithmetic is carried out on an exact fixed-point copy of the kernel,
//! so the result does not depend on enumeration order or worker count and is
//! invariant under simultaneous relabeling of rows and columns.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::step::SignedStepKernel;
use crate::error::{invalid, Error, Result};
use crate::{exec, seed, sum};

/// Largest resolution accepted by exact enumeration.
pub const EXACT_NORM_LIMIT: usize = 22;

const CHUNK_BITS: usize = 8;
const MAX_ALTERNATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NormMode {
    Exact,
    /// Alternating maximization from `restarts` seeded random starts.
    Heuristic { restarts: usize, seed: u64 },
}

impl NormMode {
    pub fn is_exact(&self) -> bool {
        matches!(self, NormMode::Exact)
    }
}

/// A norm value together with the vertex pair attaining it.
///
/// For the infinity-to-one norm `left`/`right` hold signs in `{-1, 1}`; for
/// the cut norm they hold indicators in `{0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormValue {
    pub value: f64,
    pub left: Vec<i8>,
    pub right: Vec<i8>,
    pub exact: bool,
}

/// Multiplies by `2^k` without intermediate underflow or overflow.
fn scale2(mut x: f64, mut k: i32) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
    }
    x * 2f64.powi(k)
}

/// Kernel entries as `i128` multiples of `2^-frac_bits`, with headroom for
/// sums of `n^2` entries.
struct FixedKernel {
    n: usize,
    m: Vec<i128>,
    frac_bits: i32,
}

impl FixedKernel {
    fn new(k: &SignedStepKernel) -> Self {
        let n = k.resolution();
        let maxabs = k.max_abs();
        let frac_bits = if maxabs == 0.0 {
            0
        } else {
            let e = maxabs.log2().ceil() as i32 + 1;
            let ln = (usize::BITS - (n - 1).leading_zeros()) as i32;
            118 - 2 * ln - e
        };
        let m = k
            .values()
            .iter()
            .map(|&v| sum::to_fixed_bits(v, frac_bits).expect("scaled entry fits in i128"))
            .collect();
        Self { n, m, frac_bits }
    }

    #[inline]
    fn row(&self, i: usize) -> &[i128] {
        &self.m[i * self.n..(i + 1) * self.n]
    }

    /// Bilinear form value `(1/n^2) * acc` as `f64`.
    fn to_value(&self, acc: i128) -> f64 {
        scale2(acc as f64, -self.frac_bits) / (self.n * self.n) as f64
    }
}

fn check_exact(n: usize) -> Result<()> {
    if n > EXACT_NORM_LIMIT {
        return Err(Error::TooLargeForExact { what: "exact norm", n, limit: EXACT_NORM_LIMIT });
    }
    Ok(())
}

fn check_restarts(mode: &NormMode) -> Result<()> {
    if let NormMode::Heuristic { restarts: 0, .. } = mode {
        return invalid("heuristic norm needs at least one restart");
    }
    Ok(())
}

/// Heuristic mode enumerates when `2^(n-1)` vertices cost no more than the
/// requested restarts; the value is then exact.
fn enumeration_is_cheaper(n: usize, restarts: usize) -> bool {
    n <= 1 || (n - 1 < usize::BITS as usize - 1 && 1usize << (n - 1) <= restarts)
}

pub fn inf_one_norm(k: &SignedStepKernel, mode: NormMode) -> Result<f64> {
    inf_one_norm_witness(k, mode).map(|v| v.value)
}

pub fn cut_norm(k: &SignedStepKernel, mode: NormMode) -> Result<f64> {
    cut_norm_witness(k, mode).map(|v| v.value)
}

pub fn inf_one_norm_witness(k: &SignedStepKernel, mode: NormMode) -> Result<NormValue> {
    check_restarts(&mode)?;
    let fk = FixedKernel::new(k);
    match mode {
        NormMode::Exact => {
            check_exact(k.resolution())?;
            Ok(exact_inf_one(&fk))
        }
        NormMode::Heuristic { restarts, .. } if enumeration_is_cheaper(k.resolution(), restarts) => {
            Ok(exact_inf_one(&fk))
        }
        NormMode::Heuristic { restarts, seed } => Ok(heuristic_inf_one(&fk, restarts, seed)),
    }
}

pub fn cut_norm_witness(k: &SignedStepKernel, mode: NormMode) -> Result<NormValue> {
    check_restarts(&mode)?;
    let fk = FixedKernel::new(k);
    match mode {
        NormMode::Exact => {
            check_exact(k.resolution())?;
            Ok(exact_cut(&fk))
        }
        NormMode::Heuristic { restarts, .. } if enumeration_is_cheaper(k.resolution(), restarts) => {
            Ok(exact_cut(&fk))
        }
        NormMode::Heuristic { restarts, seed } => Ok(heuristic_cut(&fk, restarts, seed)),
    }
}

#[inline]
fn sign(x: i128) -> i8 {
    if x >= 0 {
        1
    } else {
        -1
    }
}

/// Splits `free` enumerated bits into a chunk index (high bits) and a Gray
/// code walk (low bits). The split depends only on `free`.
fn chunking(free: usize) -> (usize, usize) {
    let high = free.min(CHUNK_BITS);
    (high, free - high)
}

fn exact_inf_one(fk: &FixedKernel) -> NormValue {
    let n = fk.n;
    // a_0 = +1 by the symmetry (a, b) -> (-a, -b)
    let (high, low) = chunking(n - 1);
    let results = exec::map_range(1 << high, |chunk| {
        let mut a = vec![1i8; n];
        for t in 0..high {
            if chunk >> t & 1 == 1 {
                a[1 + low + t] = -1;
            }
        }
        let mut c = vec![0i128; n];
        for (i, &ai) in a.iter().enumerate() {
            for (cj, &m) in c.iter_mut().zip(fk.row(i)) {
                *cj += ai as i128 * m;
            }
        }
        let value = |c: &[i128]| c.iter().map(|x| x.abs()).sum::<i128>();
        let mut best = value(&c);
        let mut best_step = 0usize;
        for s in 1usize..(1 << low) {
            let i = 1 + s.trailing_zeros() as usize;
            let old = a[i] as i128;
            a[i] = -a[i];
            for (cj, &m) in c.iter_mut().zip(fk.row(i)) {
                *cj -= 2 * old * m;
            }
            let v = value(&c);
            if v > best {
                best = v;
                best_step = s;
            }
        }
        (best, chunk, best_step)
    });
    let (best, chunk, step) = results
        .into_iter()
        .fold((-1i128, 0, 0), |acc, r| if r.0 > acc.0 { r } else { acc });
    let mut a = vec![1i8; n];
    for t in 0..high {
        if chunk >> t & 1 == 1 {
            a[1 + low + t] = -1;
        }
    }
    let gray = step ^ (step >> 1);
    for t in 0..low {
        if gray >> t & 1 == 1 {
            a[1 + t] = -a[1 + t];
        }
    }
    let b = best_response_signs(fk, &a);
    NormValue { value: fk.to_value(best), left: a, right: b, exact: true }
}

fn column_sums(fk: &FixedKernel, a: &[i8]) -> Vec<i128> {
    let mut c = vec![0i128; fk.n];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (cj, &m) in c.iter_mut().zip(fk.row(i)) {
            *cj += ai as i128 * m;
        }
    }
    c
}

fn row_sums(fk: &FixedKernel, b: &[i8]) -> Vec<i128> {
    (0..fk.n)
        .map(|i| fk.row(i).iter().zip(b).map(|(&m, &bj)| bj as i128 * m).sum())
        .collect()
}

fn best_response_signs(fk: &FixedKernel, a: &[i8]) -> Vec<i8> {
    column_sums(fk, a).into_iter().map(sign).collect()
}

fn heuristic_inf_one(fk: &FixedKernel, restarts: usize, seed: u64) -> NormValue {
    let n = fk.n;
    let runs = exec::map_range(restarts, |r| {
        let mut rng = seed::stream_rng(seed, r as u64);
        let mut a: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let mut best = i128::MIN;
        let mut best_pair = (a.clone(), a.clone());
        for _ in 0..MAX_ALTERNATIONS {
            let c = column_sums(fk, &a);
            let b: Vec<i8> = c.iter().map(|&x| sign(x)).collect();
            let r = row_sums(fk, &b);
            let v: i128 = r.iter().map(|x| x.abs()).sum();
            if v <= best {
                break;
            }
            a = r.iter().map(|&x| sign(x)).collect();
            best = v;
            best_pair = (a.clone(), b);
        }
        (best, best_pair)
    });
    let (best, (a, b)) = runs
        .into_iter()
        .reduce(|acc, r| if r.0 > acc.0 { r } else { acc })
        .expect("at least one restart");
    NormValue { value: fk.to_value(best), left: a, right: b, exact: false }
}

/// `max(sum of positive parts, sum of negative parts)` of column sums and the
/// matching column set.
fn cut_value(c: &[i128]) -> (i128, bool) {
    let (mut pos, mut neg) = (0i128, 0i128);
    for &x in c {
        if x > 0 {
            pos += x;
        } else {
            neg -= x;
        }
    }
    if pos >= neg {
        (pos, true)
    } else {
        (neg, false)
    }
}

fn cut_columns(c: &[i128], positive: bool) -> Vec<i8> {
    c.iter()
        .map(|&x| ((positive && x > 0) || (!positive && x < 0)) as i8)
        .collect()
}

fn exact_cut(fk: &FixedKernel) -> NormValue {
    let n = fk.n;
    let (high, low) = chunking(n);
    let results = exec::map_range(1 << high, |chunk| {
        let mut s = vec![0i8; n];
        for t in 0..high {
            s[low + t] = (chunk >> t & 1) as i8;
        }
        let mut c = column_sums(fk, &s);
        let mut best = cut_value(&c).0;
        let mut best_step = 0usize;
        for step in 1usize..(1 << low) {
            let i = step.trailing_zeros() as usize;
            s[i] ^= 1;
            let row = fk.row(i);
            if s[i] == 1 {
                c.iter_mut().zip(row).for_each(|(cj, &m)| *cj += m);
            } else {
                c.iter_mut().zip(row).for_each(|(cj, &m)| *cj -= m);
            }
            let v = cut_value(&c).0;
            if v > best {
                best = v;
                best_step = step;
            }
        }
        (best, chunk, best_step)
    });
    let (best, chunk, step) = results
        .into_iter()
        .fold((-1i128, 0, 0), |acc, r| if r.0 > acc.0 { r } else { acc });
    let mut s = vec![0i8; n];
    for t in 0..high {
        s[low + t] = (chunk >> t & 1) as i8;
    }
    let gray = step ^ (step >> 1);
    for (t, st) in s.iter_mut().enumerate().take(low) {
        *st ^= (gray >> t & 1) as i8;
    }
    let c = column_sums(fk, &s);
    let (_, positive) = cut_value(&c);
    let t = cut_columns(&c, positive);
    NormValue { value: fk.to_value(best), left: s, right: t, exact: true }
}

fn heuristic_cut(fk: &FixedKernel, restarts: usize, seed: u64) -> NormValue {
    let n = fk.n;
    let runs = exec::map_range(restarts, |r| {
        let mut rng = seed::stream_rng(seed, r as u64);
        let start: Vec<i8> = (0..n).map(|_| rng.gen::<bool>() as i8).collect();
        let mut best = (-1i128, start.clone(), start.clone());
        for positive in [true, false] {
            let sgn: i128 = if positive { 1 } else { -1 };
            let mut s = start.clone();
            let mut cur = -1i128;
            for _ in 0..MAX_ALTERNATIONS {
                let c = column_sums(fk, &s);
                let t = cut_columns(&c, positive);
                let rows = row_sums(fk, &t);
                let next: Vec<i8> = rows.iter().map(|&x| (sgn * x > 0) as i8).collect();
                let v: i128 = rows.iter().map(|&x| (sgn * x).max(0)).sum();
                if v <= cur {
                    break;
                }
                cur = v;
                s = next;
                if v > best.0 {
                    best = (v, s.clone(), t);
                }
            }
        }
        best
    });
    let (best, s, t) = runs
        .into_iter()
        .reduce(|acc, r| if r.0 > acc.0 { r } else { acc })
        .expect("at least one restart");
    NormValue { value: fk.to_value(best), left: s, right: t, exact: false }
}
