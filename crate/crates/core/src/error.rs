use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("divergent quantity: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
