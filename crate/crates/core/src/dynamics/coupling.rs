//! Registry of intrinsic dynamics `f` and pair interactions `D`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Intrinsic dynamics `f(u, xi, t)`; none depend on `u`, so `L_f = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Intrinsic {
    /// `zero`
    Zero,
    /// `constant_drift:<c>`
    ConstantDrift(f64),
    /// `frequency:<bound>`: the node parameter, with a declared bound on `|xi|`
    Frequency(f64),
}

/// Pair interaction `D(u, v)` felt by `u` from `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Interaction {
    /// `sin(2 pi (v - u))`
    Kuramoto,
    /// `v - u`; unbounded, admitted for closed-form checks only
    Linear,
    /// `tanh(v - u)`
    TanhDiff,
}

impl Intrinsic {
    #[inline]
    pub fn eval(&self, _u: f64, xi: f64, _t: f64) -> f64 {
        match *self {
            Intrinsic::Zero => 0.0,
            Intrinsic::ConstantDrift(c) => c,
            Intrinsic::Frequency(_) => xi,
        }
    }

    pub fn lipschitz(&self) -> f64 {
        0.0
    }

    pub fn bound(&self) -> f64 {
        match *self {
            Intrinsic::Zero => 0.0,
            Intrinsic::ConstantDrift(c) => c.abs(),
            Intrinsic::Frequency(b) => b,
        }
    }

    pub fn needs_parameters(&self) -> bool {
        matches!(self, Intrinsic::Frequency(_))
    }
}

impl Interaction {
    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match self {
            Interaction::Kuramoto => (2.0 * PI * (v - u)).sin(),
            Interaction::Linear => v - u,
            Interaction::TanhDiff => (v - u).tanh(),
        }
    }

    /// Lipschitz constant in each argument.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Interaction::Kuramoto => 2.0 * PI,
            Interaction::Linear | Interaction::TanhDiff => 1.0,
        }
    }

    pub fn bound(&self) -> f64 {
        match self {
            Interaction::Kuramoto | Interaction::TanhDiff => 1.0,
            Interaction::Linear => f64::INFINITY,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Interaction::Kuramoto)
    }
}

impl FromStr for Intrinsic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let num = |v: &str| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad number in '{s}'")))
        };
        match s.trim() {
            "zero" => Ok(Intrinsic::Zero),
            t => {
                if let Some(v) = t.strip_prefix("constant_drift:") {
                    Ok(Intrinsic::ConstantDrift(num(v)?))
                } else if let Some(v) = t.strip_prefix("frequency:") {
                    Ok(Intrinsic::Frequency(num(v)?.abs()))
                } else {
                    Err(Error::Parse(format!("unknown intrinsic dynamics '{t}'")))
                }
            }
        }
    }
}

impl FromStr for Interaction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "kuramoto" => Ok(Interaction::Kuramoto),
            "linear" => Ok(Interaction::Linear),
            "tanh_diff" => Ok(Interaction::TanhDiff),
            t => Err(Error::Parse(format!("unknown interaction '{t}'"))),
        }
    }
}

impl fmt::Display for Intrinsic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Intrinsic::Zero => write!(f, "zero"),
            Intrinsic::ConstantDrift(c) => write!(f, "constant_drift:{c}"),
            Intrinsic::Frequency(b) => write!(f, "frequency:{b}"),
        }
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interaction::Kuramoto => "kuramoto",
            Interaction::Linear => "linear",
            Interaction::TanhDiff => "tanh_diff",
        })
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl TryFrom<String> for $t {
            type Error = Error;
            fn try_from(s: String) -> Result<Self> {
                s.parse()
            }
        }
        impl From<$t> for String {
            fn from(v: $t) -> String {
                v.to_string()
            }
        }
    };
}
string_serde!(Intrinsic);
string_serde!(Interaction);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub f: Intrinsic,
    pub d: Interaction,
}

impl CouplingSpec {
    pub fn new(f: Intrinsic, d: Interaction) -> Self {
        Self { f, d }
    }

    pub fn kuramoto() -> Self {
        Self::new(Intrinsic::Zero, Interaction::Kuramoto)
    }

    /// Largest stable step for kernels bounded by `kernel_bound`.
    pub fn max_dt(&self, kernel_bound: f64) -> f64 {
        let rate = self.f.lipschitz() + 2.0 * kernel_bound * self.d.lipschitz();
        if rate == 0.0 {
            f64::INFINITY
        } else {
            0.1 / rate
        }
    }

    pub fn id(&self) -> String {
        format!("{}+{}", self.f, self.d)
    }
}
