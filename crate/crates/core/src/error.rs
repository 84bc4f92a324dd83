//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state vector is not normalized: norm² = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("unsupported dimension {0}: only 1- and 2-qubit objects (2 or 4) are supported")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: max |M - M†| = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    TraceNotUnit { trace: f64 },

    #[error("density matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("expectation value has imaginary residual {0:e}; operand is not Hermitian")]
    ImaginaryExpectation(f64),

    #[error("negative probability {value:e} for outcome {outcome}")]
    NegativeProbability { outcome: usize, value: f64 },

    #[error("probabilities sum to {0}, expected 1")]
    DistributionNotNormalized(f64),

    #[error("cannot sample from an empty distribution")]
    EmptyDistribution,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Kraus channel violates completeness: residual {0:e}")]
    IncompleteChannel(f64),

    #[error("channel arity {found} not supported here (expected {expected})")]
    ArityMismatch { expected: usize, found: usize },

    #[error("state {0} has no closed-form evolved matrix")]
    NoClosedForm(&'static str),

    #[error("state {0} is not a Bell state")]
    NotBellState(&'static str),

    #[error("transcript is from {found}, expected {expected}")]
    WrongProtocol {
        expected: &'static str,
        found: &'static str,
    },

    #[error("protocol aborted: only {0} sifted rounds, at least 2 required for check bits")]
    TooFewSifted(usize),

    #[error("no test rounds for setting pair {0}")]
    InsufficientData(String),

    #[error("transcript contains no key rounds")]
    NoKeyRounds,

    #[error("strategy guesses {0}, which is outside the outcome distribution's support")]
    SupportMismatch(&'static str),

    #[error("invalid sweep config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
}
