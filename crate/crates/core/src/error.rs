//! Crate-wide error type.

use thiserror::Error;

/// Failure modes shared by every module. The CLI maps these onto exit codes,
/// so the distinction between variants is part of the public contract.
#[derive(Debug, Error)]
pub enum Error {
    /// The input lies outside the mathematical domain of the operation.
    #[error("domain: {0}")]
    Domain(String),
    /// The result cannot be represented in f64 (overflow, or underflow to zero
    /// where zero is excluded).
    #[error("range: {0}")]
    Range(String),
    /// The computation would lose essentially all significant digits.
    #[error("precision: {0}")]
    Precision(String),
    /// Structurally invalid arguments (bad index, mismatched variable counts, ...).
    #[error("usage: {0}")]
    Usage(String),
    /// An iteration cap was exceeded before the algorithm converged.
    #[error("iteration cap exceeded: {0}")]
    IterationCap(String),
    /// Malformed serialized data.
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
