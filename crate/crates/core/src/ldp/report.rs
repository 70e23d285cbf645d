use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graphon::{Permutation, StepGraphon};

/// How a reported rate relates to the true infimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateMode {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "heuristic-upper")]
    HeuristicUpper,
    #[serde(rename = "heuristic-lower")]
    HeuristicLower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Permutation(Permutation),
    Graphon(StepGraphon),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    #[serde(with = "inf_as_string")]
    pub value: f64,
    pub mode: RateMode,
    pub witness: Option<Witness>,
}

impl RateReport {
    pub fn exact(value: f64) -> Self {
        Self { value, mode: RateMode::Exact, witness: None }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Serializes `f64` with infinities as the strings `"inf"` / `"-inf"`.
pub mod inf_as_string {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else if *v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad number '{s}'"))),
        }
    }
}
