use alloc::string::String;

/// Errors raised by the walk engine and the analysis routines built on it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} = {value} lies outside [0, 1]")]
    OutOfUnitInterval { name: &'static str, value: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("walker left the simulation window while stepping from t = {time}")]
    WindowOverflow { time: usize },

    #[error("size mismatch: expected {expected} sites, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("states must share one geometry")]
    GeometryMismatch,

    #[error("time mismatch: expected t = {expected}, found t = {found}")]
    TimeMismatch { expected: usize, found: usize },

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("density matrix trace {0} differs from 1")]
    Trace(f64),

    #[error("density matrix has eigenvalue {0} below the clipping tolerance")]
    NegativeEigenvalue(f64),

    #[error("eigensolver failed on a {dim}x{dim} matrix: {reason}")]
    Eigensolver { dim: usize, reason: String },

    #[error("quadrature not converged at x = {x}, t = {t}: doubling {points} points moved the result by {change:e}")]
    Quadrature {
        x: i64,
        t: usize,
        points: usize,
        change: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
