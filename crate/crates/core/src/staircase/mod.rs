//! Approximation of couplings with uniform marginals by measure-preserving
//! staircase bijections.

pub mod bijection;
pub mod coupling;
pub mod weak;

pub use bijection::{pushforward_blocks, staircase_bijection, PiecewiseBijection, Segment};
pub use coupling::{coupling_from_samples, sinkhorn, DiscreteCoupling, MARGINAL_TOL};
pub use weak::{staircase_convergence, test_integrals, weak_distance};
