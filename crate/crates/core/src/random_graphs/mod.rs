//! W-random graph sampling, empirical graphons and initial data.

pub mod adjacency;
pub mod gridfn;
pub mod initial;
pub mod sampler;

pub use adjacency::AdjacencyGraph;
pub use gridfn::GridFunction;
pub use initial::{make_initial_condition, make_parameters, FiniteLaw, InitialCondition, InitialKind, Profile};
pub use sampler::{log_likelihood_ratio, sample_sparse, sample_tilted, sample_w_random, TiltedSample};
