use std::io;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{what} index {index} out of range for {len} positions")]
    Index {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("{qubits} qubits exceeds the dense capacity of {limit}")]
    Capacity { qubits: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("mixture weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("private key admits no valid k1 (no odd-weight output found); regenerate the private key")]
    NoValidK1,

    #[error("public key {0} has already been consumed")]
    KeyConsumed(String),

    #[error("unknown public key {0}")]
    UnknownKey(String),

    #[error("ciphertext does not match key")]
    CiphertextMismatch,

    #[error("unsupported state: {0}")]
    UnsupportedState(&'static str),

    #[error("inconsistent observations")]
    InconsistentObservations,

    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
