use thiserror::Error;

use crate::report::VerificationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller passed arguments that violate an operation's preconditions.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("matrix is not symmetric: max |S - S^T| = {asymmetry:e} exceeds {tolerance:e}")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sequence is not nonincreasing at index {index}: {prev} < {next}")]
    NotNonincreasing { index: usize, prev: f64, next: f64 },

    #[error("sequence has a negative entry at index {index}: {value}")]
    Negative { index: usize, value: f64 },

    /// The spectrum does not majorize the lengths, so no eigensteps exist.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(
        "inconsistent prefix at (n={n}, k={k}): lower bound {lower} exceeds upper bound {upper}"
    )]
    InconsistentPrefix {
        n: usize,
        k: usize,
        lower: f64,
        upper: f64,
    },

    #[error(
        "interlacing violated at eigenvalue {value}: multiplicity drops from {before} to {after}"
    )]
    InterlacingViolation {
        value: f64,
        before: usize,
        after: usize,
    },

    #[error("negative projection weight {weight:e} for eigenvalue {value}")]
    NegativeWeight { value: f64, weight: f64 },

    #[error(
        "eigenspace for eigenvalue {value} does not match the computed spectrum (nearest {found})"
    )]
    EigenspaceMismatch { value: f64, found: f64 },

    #[error("direction has no component in the eigenspace for eigenvalue {value}")]
    EmptyEigenspace { value: f64 },

    #[error("eigenstep table is invalid:\n{0}")]
    InvalidTable(VerificationReport),

    #[error("parse error: {0}")]
    Parse(String),
}
