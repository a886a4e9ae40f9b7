use thiserror::Error;

#[derive(Debug, Error)]
pub enum KgError {
    #[error("spectrum is not Hermitian at mode {mode}: defect {defect:e}")]
    SymmetryViolation { mode: i64, defect: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("grid mismatch: N={left} vs N={right}")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid grid size N={0}: need 2N >= 8")]
    InvalidGrid(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite coefficient after step {step}")]
    BlowUp { step: usize },

    #[error("reference solution has zero {component} norm")]
    DegenerateReference { component: &'static str },

    #[error("order fit needs at least two usable rows, got {0}")]
    TooFewRows(usize),

    #[error("empty sample window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("reference certification failed: schemes disagree by {gap:e} (tolerance {tolerance:e})")]
    Certification { gap: f64, tolerance: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, KgError>;
