use thiserror::Error;

/// One attempt of the truncation auto-sizing loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SizingAttempt {
    pub d1: usize,
    pub d2: usize,
    /// Probability weight found outside the interior shells.
    pub edge_weight: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("truncation too small: edge weight {edge_weight:e} exceeds leak_tol {leak_tol:e} at d1={d1}, d2={d2}")]
    TruncationTooSmall {
        d1: usize,
        d2: usize,
        edge_weight: f64,
        leak_tol: f64,
        trace: Vec<SizingAttempt>,
    },

    #[error("state is not normalized: |norm^2 - 1| = {deviation:e}")]
    NotNormalized { deviation: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("finite-difference step {0:e} outside [1e-6, 1e-2]")]
    InvalidStep(f64),

    #[error("degenerate nuisance: F11 = 0 but F12 = {f12:e}")]
    DegenerateNuisance { f12: f64 },

    #[error("singular jacobian (det = {det:e})")]
    SingularJacobian { det: f64 },

    #[error("no information: QFI = {0:e} is not positive")]
    NoInformation(f64),

    #[error("numerical quality: {0}")]
    NumericalQuality(String),

    #[error("invalid scan grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
