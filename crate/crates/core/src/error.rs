use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "matrix is not Hermitian: entry ({row}, {col}) differs from the conjugate of ({col}, {row}) by {deviation:e}"
    )]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("density matrix trace is {re} + {im}i, expected 1")]
    TraceNotUnit { re: f64, im: f64 },

    #[error("density matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("projector is not idempotent: max |P^2 - P| = {0:e}")]
    NotIdempotent(f64),

    #[error("eigendecomposition failed: {0}")]
    Decomposition(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operation `{operation}` is not supported for {kind} clocks")]
    UnsupportedClockKind {
        operation: &'static str,
        kind: &'static str,
    },

    #[error("clock time {time} is outside the domain of the width function (must be below T_max = {t_max})")]
    ClockDomain { time: f64, t_max: f64 },

    #[error("time grid does not resolve the clock distribution: {0}")]
    InsufficientGrid(String),

    #[error("integration failed at T = {time}: {reason}; try a smaller step")]
    IntegrationFailure { time: f64, reason: String },

    #[error("step h = {step} too large: h * (|H|^2 sigma + |H|) = {measure} must stay below 0.1")]
    StepTooLarge { step: f64, measure: f64 },

    #[error("state has zero trace")]
    DegenerateState,

    #[error("ideal-time limit did not converge under grid enlargement (relative change {change:e})")]
    GridConvergence { change: f64 },

    #[error("clock reading is not monotone in ideal time near t = {time}")]
    ClockFolding { time: f64 },

    #[error("clock never reads the requested interval on the time grid")]
    ClockNeverReads,

    #[error("observable does not commute with the Hamiltonian: max |[C, H]| = {norm:e}")]
    NonCommuting { norm: f64 },

    #[error("spin bath with {atoms} atoms exceeds the brute-force limit of {limit}")]
    ResourceLimit { atoms: usize, limit: usize },

    #[error("coherence undefined: system amplitude product a b* vanishes")]
    UndefinedCoherence,

    #[error("coherence factor modulus {modulus} exceeds 1")]
    InvalidCoherence { modulus: f64 },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
