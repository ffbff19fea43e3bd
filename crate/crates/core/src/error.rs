use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("singular or ill-conditioned input: {0}")]
    Singular(String),
    #[error("matrix is not nilpotent within {0} powers")]
    NotNilpotent(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("support escapes the grid: boundary mass fraction {0:.3e}")]
    SupportEscape(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("integrability guard violated: {0}")]
    Guard(String),
    #[error("parameter sits on a pole: {0}")]
    AtPole(String),
    #[error("monte carlo failure: {0}")]
    MonteCarlo(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
