use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Pauli string {text:?}: {reason}")]
    InvalidPauli { text: String, reason: String },

    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// The dense oracle refuses to build objects above its configured size.
    #[error("{qubits} system qubits exceeds the dense simulation limit of {limit}")]
    DenseLimit { qubits: usize, limit: usize },

    /// A documented precondition of an algorithm does not hold (bad evolution
    /// time, budget outside its domain, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("tableau is not symplectic: {0}")]
    NotSymplectic(String),

    /// The normalisation estimate came out non-positive, so the coefficient
    /// vector cannot be rescaled. More samples are needed.
    #[error("normalisation estimate {estimate} is not above the floor {floor}; increase the number of samples")]
    NonPositiveNormalization { estimate: f64, floor: f64 },

    #[error(
        "attempt cap of {cap} exceeded with only {successes} of {required} successful preparations"
    )]
    AttemptCapExceeded {
        cap: u64,
        successes: u64,
        required: u64,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("malformed shadow data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
