use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The point lies outside the region where the quantity is defined
    /// (on the bifurcation diagram, wrong stratum, outside the model domain).
    #[error("outside domain: {0}")]
    Domain(String),
    /// A Gamma-function pole was hit.
    #[error("gamma pole at {0}")]
    Pole(f64),
    /// Parameter region not covered by the implementation.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An iterative method failed to reach the requested accuracy.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// A degenerate (singular) configuration.
    #[error("degenerate: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
