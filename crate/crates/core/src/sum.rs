//! Order-independent summation.
//!
//! Several results must be bitwise invariant under relabeling of nodes, which
//! plain left-to-right `f64` summation is not. [`ExactSum`] returns the
//! correctly rounded value of the exact sum; [`FixedSum`] accumulates in
//! 64-bit-fraction fixed point and is the faster choice for bounded terms.

/// Correctly rounded floating-point sum (Shewchuk's partials).
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
    special: f64,
    has_special: bool,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        if !x.is_finite() {
            self.special = if self.has_special { self.special + x } else { x };
            self.has_special = true;
            return;
        }
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub fn value(&self) -> f64 {
        if self.has_special {
            return self.special;
        }
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // half-way case: push the rounding in the direction of the remaining partials
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

pub fn exact_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = ExactSum::new();
    s.extend(xs);
    s.value()
}

const FRAC_BITS: i32 = 64;

/// Fixed-point accumulator with 64 fractional bits.
///
/// Terms are truncated toward zero at 2^-64 and must stay below 2^62 in
/// magnitude; anything else marks the sum as overflowed and `value()` is NaN.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedSum {
    acc: i128,
    bad: bool,
}

#[inline]
pub(crate) fn to_fixed(x: f64) -> Option<i128> {
    to_fixed_bits(x, FRAC_BITS)
}

/// `x * 2^frac_bits` truncated toward zero, or `None` if it does not fit.
#[inline]
pub(crate) fn to_fixed_bits(x: f64, frac_bits: i32) -> Option<i128> {
    if x == 0.0 {
        return Some(0);
    }
    if !x.is_finite() {
        return None;
    }
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    let shift = e + frac_bits;
    let mag: i128 = if shift >= 0 {
        if shift > 126 - 53 {
            return None;
        }
        (mant as i128) << shift
    } else if shift <= -64 {
        0
    } else {
        (mant as i128) >> (-shift)
    };
    Some(if negative { -mag } else { mag })
}

impl FixedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        match to_fixed(x).and_then(|v| self.acc.checked_add(v)) {
            Some(a) => self.acc = a,
            None => self.bad = true,
        }
    }

    pub fn value(&self) -> f64 {
        if self.bad {
            return f64::NAN;
        }
        (self.acc as f64) * (-(FRAC_BITS as f64)).exp2()
    }
}
