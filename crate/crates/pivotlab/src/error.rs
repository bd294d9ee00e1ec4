use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("exact zero pivot at elimination step {0}")]
    ZeroPivot(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid pivot sequence: {0}")]
    InvalidSequence(String),
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("butterfly angle {0} has |tan| = 1 (tie); GEPP closed form undefined")]
    TieAngle(usize),
    #[error("eigenvalue iteration failed to converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("empty sample after exclusions")]
    EmptySample,
    #[error("invalid experiment config: {0}")]
    ConfigError(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
