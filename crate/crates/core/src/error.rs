use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix of dimension {dim} needs {expected} entries, got {got}")]
    BadShape { dim: usize, expected: usize, got: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range for {nqubits} qubits")]
    QubitOutOfRange { index: usize, nqubits: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix has eigenvalue {eigenvalue:e} below the PSD slack")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("trace {trace} differs from 1")]
    BadTrace { trace: f64 },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: String },

    #[error("expected {expected} qubits, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("{0}")]
    InvalidRole(String),

    #[error("{0}")]
    Incompatible(String),

    #[error("no root of gamma_2(epsilon) = 1 in the bracket ({lo:e}, {hi:e}): {detail}")]
    NoRoot { lo: f64, hi: f64, detail: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown {kind} '{value}'")]
    Unknown { kind: &'static str, value: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, value, reason: reason.into() }
    }
}
