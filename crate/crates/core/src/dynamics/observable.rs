use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use crate::error::Error;
use crate::sum::exact_sum;

/// Scalar functionals of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `||u(T)||_{L2}`
    TerminalL2,
    /// `|int exp(2 pi i u(T, x)) dx|`, the phase coherence at the final time
    OrderParameter,
    /// `int u(T, x) dx`
    TerminalMean,
}

impl Observable {
    pub fn eval(&self, traj: &Trajectory) -> f64 {
        let s = traj.final_state();
        match self {
            Observable::TerminalL2 => s.l2_norm(),
            Observable::TerminalMean => s.mean(),
            Observable::OrderParameter => {
                let n = s.resolution() as f64;
                let re = exact_sum(s.values().iter().map(|u| (2.0 * PI * u).cos())) / n;
                let im = exact_sum(s.values().iter().map(|u| (2.0 * PI * u).sin())) / n;
                re.hypot(im)
            }
        }
    }
}

impl FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        serde_json::from_value(serde_json::Value::String(s.trim().to_string()))
            .map_err(|_| Error::Parse(format!("unknown observable '{s}'")))
    }
}
