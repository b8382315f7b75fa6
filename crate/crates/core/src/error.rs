use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative asymmetry {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("negative eigenvalue {eigenvalue:.3e} below -zero_tol")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("trace is not one (trace {trace})")]
    TraceNotOne { trace: f64 },

    #[error("entry buffer of length {len} does not match shape {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, len: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("length mismatch in {context}: expected {expected}, got {found}")]
    LengthMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("not a probability distribution: {reason}")]
    NotDistribution { reason: String },

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { dim: usize, rank: usize },

    #[error("block rotation {block} has dimension {found}, block has dimension {expected}")]
    BlockShapeMismatch {
        block: usize,
        expected: usize,
        found: usize,
    },

    #[error("channel is not trace preserving (defect {defect:.3e})")]
    NotTracePreserving { defect: f64 },

    #[error("channel needs at least one Kraus operator")]
    NoKraus,

    #[error("not a column-stochastic matrix: {reason}")]
    NotStochastic { reason: String },

    #[error("invalid POVM: {reason}")]
    InvalidPovm { reason: String },

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("parameter out of range for {channel}: {reason}")]
    ParamOutOfRange { channel: String, reason: String },

    #[error("decomposition does not reconstruct the state (Frobenius defect {defect:.3e})")]
    DecompositionMismatch { defect: f64 },

    #[error("state set is empty")]
    EmptyStateSet,

    #[error("family is empty")]
    EmptyFamily,

    #[error("coding is empty or its states disagree in dimension")]
    InvalidCoding,
}

pub type Result<T> = std::result::Result<T, Error>;
