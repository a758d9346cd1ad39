//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by group construction, grid operations and experiments.
#[derive(Debug, Error)]
pub enum HgcError {
    #[error("invalid group definition: {0}")]
    InvalidGroup(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite sample at grid point {index:?} (coordinates {coords:?})")]
    NonFiniteSample { index: Vec<usize>, coords: Vec<f64> },

    #[error("operation requires power-of-two grid sizes, got {0:?}")]
    NonPowerOfTwoGrid(Vec<usize>),

    #[error("derivative order too high: requested {requested}, supported {supported}")]
    DerivativeOrder { requested: usize, supported: usize },

    #[error("moment-free precondition failed: {0}")]
    NotMomentFree(String),

    #[error("decay certificate failure: {0}")]
    DecayCertificate(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HgcError>;
