use thiserror::Error;

/// Errors produced by the simulation and certification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} = {value} (max {max})")]
    Capacity {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),

    #[error("state has no partition representation: {0}")]
    Representation(String),

    #[error("numerical consistency check failed: {0}")]
    Consistency(String),

    #[error("network failed validation: {what} (max deviation {deviation:e})")]
    Construction { what: String, deviation: f64 },

    #[error("phase alpha = {0} has cos(alpha) = 0; the fringe carries no information")]
    UnusablePhase(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("search did not reach the target {target} (best value {best})")]
    Search { best: f64, target: f64 },

    #[error("no events left after post-selection on {n} photons")]
    EmptyData { n: usize },

    #[error("assumption not satisfied: {0}")]
    Assumption(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn capacity(what: &'static str, value: usize, max: usize) -> Result<()> {
    if value > max {
        Err(Error::Capacity { what, value, max })
    } else {
        Ok(())
    }
}
