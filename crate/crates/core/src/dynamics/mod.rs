//! Networked dynamical systems on step kernels and their continuum limit.

pub mod coupling;
pub mod observable;
pub mod simulate;
pub mod trajectory;

pub use coupling::{CouplingSpec, Interaction, Intrinsic};
pub use observable::Observable;
pub use simulate::{a_priori_bound_check, simulate, solve_continuum, BoundCheck, SimConfig};
pub use trajectory::{quotient_trajectory_distance, trajectory_distance, QuotientTrajectoryDistance, Trajectory};
