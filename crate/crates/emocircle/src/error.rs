//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A vector of description degrees violates the simplex invariants.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// The compound vector magnitude is below the degeneracy threshold,
    /// so its angle (and the mapping Jacobian) is undefined.
    #[error("degenerate emotion vector: intensity {intensity:e} below threshold {threshold:e}")]
    Degenerate { intensity: f64, threshold: f64 },

    /// An angle argument lies outside `[0, 2*pi)`.
    #[error("angle {0} outside [0, 2*pi)")]
    AngleOutOfRange(f64),

    /// Mismatched lengths or matrix dimensions between paired inputs.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A text input (CSV row, config line, CLI value) failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An operation that needs at least one sample received none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A loss or parameter became NaN or infinite.
    #[error("numerical failure: {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
