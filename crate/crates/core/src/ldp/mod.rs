//! Rate functions, concentration bounds and rare-event estimation.

pub mod bernstein;
pub mod dynrate;
pub mod legendre;
pub mod rare_event;
pub mod rate;
pub mod report;

pub use bernstein::{bernstein_bound, empirical_tail, h, BinaryProcess};
pub use dynrate::{dynamical_rate_search, DynRateResult, DynRateSearch};
pub use legendre::{deterministic_rate, integrated_legendre_rate, legendre_rate};
pub use rare_event::{
    estimate_probability, estimate_rare_event, exact_event_probability, exact_tilted_expectation,
    BallEvent, EventMetric, RareEventEstimate, WeightedEstimate, EXACT_EVENT_LIMIT,
};
pub use rate::{bernoulli_relative_entropy, ell, rate_quotient, sparse_rate, upsilon};
pub use report::{RateMode, RateReport, Witness};
