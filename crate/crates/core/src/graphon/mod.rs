//! Step graphons, projections and cut-type metrics.

pub mod io;
pub mod kernel;
pub mod norm;
pub mod quotient;
pub mod step;

pub use kernel::{project_analytic, project_step, Kernel, KernelSpec};
pub use norm::{cut_norm, inf_one_norm, NormMode, NormValue, EXACT_NORM_LIMIT};
pub use quotient::{d_cut, d_inf_one, delta_inf_one, QuotientDistance, QuotientMode};
pub use step::{common_refinement, Permutation, SignedStepKernel, StepGraphon};
