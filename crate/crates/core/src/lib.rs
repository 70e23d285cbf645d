//! Large deviations for W-random graphs and for dynamics on them.
//!
//! * [`graphon`]: step graphons, projections, cut and infinity-to-one metrics
//! * [`random_graphs`]: seeded W-random graph samplers and initial data
//! * [`dynamics`]: RK4 simulation of networked systems and their continuum limit
//! * [`ldp`]: rate functions, concentration bounds and rare-event estimation
//! * [`staircase`]: measure-preserving bijections approximating couplings

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod graphon;
pub mod ldp;
pub mod random_graphs;
pub mod seed;
pub mod staircase;
pub mod sum;

pub use error::{Error, Result};
