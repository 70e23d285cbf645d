use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel value {value} at ({x}, {y}) lies outside [0, 1]")]
    KernelOutOfRange { x: f64, y: f64, value: f64 },

    #[error("{what}: n = {n} exceeds the exact-mode limit of {limit}")]
    TooLargeForExact { what: &'static str, n: usize, limit: usize },

    #[error("common refinement of resolutions {a} and {b} is {lcm}, above the cap of {cap}")]
    RefinementTooLarge { a: usize, b: usize, lcm: usize, cap: usize },

    #[error("resolution mismatch: {0} vs {1}")]
    ResolutionMismatch(usize, usize),

    #[error("time grids differ")]
    TimeGridMismatch,

    #[error("time step {dt} exceeds the stability guard {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("non-finite state at t = {t} (node {node}, value {value})")]
    NonFiniteState { t: f64, node: usize, value: f64 },

    #[error("sinkhorn projection did not reach tolerance {tol} after {iterations} iterations")]
    SinkhornStalled { tol: f64, iterations: usize },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
