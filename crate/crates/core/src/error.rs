use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("aliasing: grid of size {grid} cannot carry {needed} coefficients without wrap-around")]
    Aliasing { grid: usize, needed: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
