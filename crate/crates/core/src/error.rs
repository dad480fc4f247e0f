use thiserror::Error;

/// Failures raised by the laboratory.
///
/// `Domain` covers caller mistakes (bad arguments, out-of-range indices,
/// configurations a formula cannot serve). `Numerical` means a computation
/// produced something that should be impossible, such as a strongly negative
/// eigenvalue of a correlation matrix.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
