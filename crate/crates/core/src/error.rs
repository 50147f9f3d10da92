use thiserror::Error;

#[derive(Debug, Error)]
pub enum QsqError {
    #[error("{qubits} qubits exceeds the dense simulation limit of {limit}")]
    DimensionLimit { qubits: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("operator is not unitary (defect {defect:.3e})")]
    NonUnitary { defect: f64 },

    #[error("state is not normalized (|norm² − 1| = {defect:.3e})")]
    NotNormalized { defect: f64 },

    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("observable norm {norm} exceeds 1")]
    NormViolation { norm: f64 },

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("partial trace needs a non-empty set of kept qubits")]
    EmptyKeepSet,

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("coefficient list is empty")]
    EmptyList,

    #[error("anchor coefficient estimate {magnitude} is below tau/2 = {half_tolerance}")]
    AnchorTooSmall { magnitude: f64, half_tolerance: f64 },

    #[error("influence phase selected {found} qubits, more than the junta bound k = {k}")]
    JuntaTooLarge { found: usize, k: usize },

    #[error("channel is not trace preserving (defect {defect:.3e})")]
    NotTracePreserving { defect: f64 },

    #[error("invalid Pauli label: {0}")]
    InvalidPauli(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QsqError>;
