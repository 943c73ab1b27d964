use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: colour index out of range: {colour} (k = {k})")]
    ColourOutOfRange { line: usize, colour: usize, k: usize },

    #[error("inconsistent colour count: axis {axis} has k = {found}, expected {expected}")]
    InconsistentColours {
        axis: usize,
        expected: usize,
        found: usize,
    },

    #[error("capacity guard `{guard}` refused: projected size {estimate} exceeds limit {limit}")]
    CapacityExceeded {
        guard: &'static str,
        estimate: u128,
        limit: u64,
    },

    #[error("work limit exceeded in {what}: more than {limit} partial assignments")]
    WorkLimitExceeded { what: &'static str, limit: u64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} states")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vector entry {index} is not strictly positive")]
    NonPositiveEntry { index: usize },

    #[error("non-finite value encountered after {iterations} iterations")]
    NonFinite { iterations: u64 },

    #[error("estimate `{0}` did not converge; it cannot feed a rigorous bound")]
    NotConverged(String),

    #[error("no friendly colour: the hypothesis of the friendly-colour inequality fails")]
    NoFriendlyColour,

    #[error("checkpoint {path:?} was written for a different operator or configuration")]
    CheckpointMismatch { path: PathBuf },

    #[error("checkpoint {path:?} is corrupt: {reason}")]
    CheckpointCorrupt { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
