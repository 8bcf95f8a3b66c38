use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit register (valid: 1..={n_qubits})")]
    IndexOutOfRange { qubit: usize, n_qubits: usize },

    #[error("two-qubit gate acts twice on qubit {qubit}")]
    DegenerateGate { qubit: usize },

    #[error("S-operator power {0} not supported (|m| <= 2)")]
    InvalidPower(i32),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("core half-width {width} leaves no tail levels on a circle of {levels} levels")]
    InvalidWidth { width: usize, levels: usize },

    #[error("no transition in scanned range: {0}")]
    NoTransitionInRange(String),

    #[error("scaling fit needs at least 3 points, got {found}")]
    InsufficientPoints { found: usize },

    #[error("only {remaining} points with positive shift remain after excluding {excluded}")]
    NonPositiveShift { excluded: usize, remaining: usize },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("malformed gate stream at line {line}: {message}")]
    GateParse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
