use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("operator is not Hermitian (asymmetry {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("operator is not positive (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace {trace} differs from 1")]
    BadTrace { trace: f64 },

    #[error("vector norm {norm} is not 1")]
    NotNormalized { norm: f64 },

    #[error("zero vector has no projective class")]
    ZeroVector,

    #[error("Hermitian eigensolver did not converge after {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("map is not completely positive (minimum Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("Kraus set must contain at least one operator")]
    EmptyKrausSet,

    #[error("unknown outcome label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate outcome label `{0}`")]
    DuplicateLabel(String),

    #[error("outcome `{label}` has probability {probability:e}; posterior undefined")]
    ZeroProbabilityOutcome { label: String, probability: f64 },

    #[error("invalid partition: {0}")]
    BadPartition(String),

    #[error("run contains no samples")]
    EmptyRun,

    #[error("symmetric dimension for n={base_dim}, d={degree} overflows")]
    Overflow { base_dim: usize, degree: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Format(String),
}
