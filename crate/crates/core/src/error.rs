use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("population has no atoms")]
    EmptyPopulation,

    #[error("all atom weights are zero")]
    ZeroTotalWeight,

    #[error("invalid weight {0}: weights must be finite and nonnegative")]
    InvalidWeight(f64),

    #[error("dataset has no points")]
    EmptyDataset,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("value {0} is not a sign (expected -1 or +1)")]
    NotASign(i64),

    #[error("points must have at least one feature")]
    ZeroDimension,

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("asymmetric corruption enumerates 2^n patterns; n = {0} exceeds the limit of {max}", max = crate::noise::MAX_EXACT_ASY_IN_DIM)]
    TooManyAttributes(usize),

    #[error("matrix is singular (pivot {pivot:e} below {threshold:e})")]
    Singular { pivot: f64, threshold: f64 },

    #[error("matrix is not square or does not match the right-hand side")]
    Shape,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("exact oracle supports at most {max} atoms, got {found}")]
    TooManyAtoms { found: usize, max: usize },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("risk surface has no minimizers")]
    NoMinimizers,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
