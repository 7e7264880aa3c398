//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by series construction, summation and verification.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QError {
    /// An exponent does not live on the configured grid (1/D)*Z, or a
    /// square root / base change would leave the grid.
    #[error("grid error: {0}")]
    Grid(String),

    /// Inversion of the zero series, or of a product containing an
    /// identically vanishing factor.
    #[error("not a unit: {0}")]
    NotAUnit(String),

    /// An adaptive sum hit the term cap before its term valuations
    /// escaped past the truncation order.
    #[error("non-convergent sum: {0}")]
    NonConvergent(String),

    /// A comparison was requested beyond the precision held by one of
    /// the operands.
    #[error("insufficient precision: requested order {requested}, available {available}")]
    InsufficientPrecision { requested: String, available: String },

    /// A denominator factor of the rational prefactor K vanishes at the
    /// given specialization.
    #[error("singular K factor: {0}")]
    SingularK(String),

    /// A specialization violates a validity constraint (vanishing
    /// Pochhammer factor in a denominator, excluded parameter value, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Unknown identity or Bailey-pair id.
    #[error("unknown id: {0}")]
    UnknownId(String),

    /// Expression or specialization syntax error, with byte position.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type QResult<T> = Result<T, QError>;
