use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit label {label} out of range for {n} qubits")]
    QubitOutOfRange { label: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("qubit label {0} is not carried by this density matrix")]
    LabelNotPresent(usize),

    #[error("invalid qubit labels: {0}")]
    InvalidLabels(String),

    #[error("at least {min} qubits required, got {n}")]
    TooFewQubits { min: usize, n: usize },

    #[error("panel entry {entry} has rank {rank} > 2 (eigenvalue {eigenvalue:e}); no pure {n}-qubit state has this marginal")]
    RankExceeded {
        entry: usize,
        n: usize,
        rank: usize,
        eigenvalue: f64,
    },

    #[error("panel is internally inconsistent: {0}")]
    InconsistentPanel(String),

    #[error("panels differ by {diff:e} (tolerance {tol:e})")]
    PanelMismatch { diff: f64, tol: f64 },

    #[error("no single-qubit unitary on qubit {qubit} relates the two states (residual {residual:e})")]
    NoLocalUnitary { qubit: usize, residual: f64 },

    #[error("certificate does not match the state: {0}")]
    InvalidCertificate(String),

    #[error("one-qubit marginal of qubit {qubit} is not maximally mixed (deviation {deviation:e})")]
    NotMaximallyMixed { qubit: usize, deviation: f64 },

    #[error("relative phase of qubit {qubit} is scalar (|sin beta| = {sin_beta:e})")]
    ScalarPhase { qubit: usize, sin_beta: f64 },

    #[error("support is not contained in an antipodal pair: {0}")]
    NonAntipodalSupport(String),
}

pub type Result<T> = std::result::Result<T, Error>;
