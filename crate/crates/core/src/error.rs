use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {dim} (must be >= 2)")]
    InvalidDimension { dim: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("unknown subsystem `{0}`")]
    UnknownSlot(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operands live on different spaces")]
    SpaceMismatch,

    #[error("truncation too small for subsystem `{subsystem}`: {detail}")]
    TruncationTooSmall { subsystem: String, detail: String },

    #[error("variance requested for an operator not flagged Hermitian")]
    NotHermitian,

    #[error("generator is not anti-Hermitian (residual {residual:e})")]
    NotAntiHermitian { residual: f64 },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("degenerate mixing angle: n_g = 1/2 gives cos(theta) = 0 and g_b = 0")]
    DegenerateMixingAngle,

    #[error("zero detuning `{0}`: Frohlich generator undefined")]
    ZeroDetuning(&'static str),

    #[error("propagation accuracy lost: norm drift {drift:e}")]
    PropagationAccuracy { drift: f64 },

    #[error("leakage {leakage:e} into top Fock levels of `{subsystem}` at t = {time:e}")]
    Leakage {
        subsystem: String,
        leakage: f64,
        time: f64,
    },

    #[error("step-size guard violated: {0}")]
    StepSize(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigendecomposition failed: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
