use thiserror::Error;

/// Errors produced by the integrators and their supporting kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFiniteMatrix,

    #[error("singular matrix: pivot {pivot:e} in column {column}")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("Pade denominator is numerically singular (reciprocal condition {rcond:e})")]
    SingularDenominator { rcond: f64 },

    #[error("invalid Pade order ({p},{q}): p + q must be at least 1")]
    InvalidPadeOrder { p: u32, q: u32 },

    #[error("vector field of `{system}` returned non-finite values at t = {t}")]
    NonFiniteField { system: String, t: f64 },

    #[error("unknown example id {0} (valid ids are 1..=7)")]
    UnknownExample(u32),

    #[error("unknown parameter `{name}` for example {id}")]
    UnknownParameter { id: u32, name: String },

    #[error("unknown tableau `{0}`")]
    UnknownTableau(String),

    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error("tableau `{name}` fails order condition for tree {tree}: {got} != {expected}")]
    OrderCondition { name: String, tree: String, got: f64, expected: f64 },

    #[error("step {index} (t = {t}) failed: {source}")]
    StepFailure { index: usize, t: f64, source: Box<Error> },

    #[error("Newton iteration did not converge from seed {seed:?}")]
    NoConvergence { seed: Vec<f64> },

    #[error("bracket endpoints classify to the same basin")]
    SameBasin,

    #[error("initial state {state:?} could not be assigned to an attractor")]
    Unclassified { state: Vec<f64> },

    #[error("differences too small to estimate an order")]
    DegenerateDifferences,

    #[error("trajectory grids or dimensions do not match")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
