use thiserror::Error;

/// Errors produced by problem construction, solvers, the oracle and the CLI glue.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("invalid function description: {0}")]
    InvalidFunction(String),

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// Step-size safeguard rejected before the first iteration.
    #[error("step-size safeguard violated: {0}")]
    Safeguard(String),

    /// A standing hypothesis (f >= 0, 0 < g <= M, finiteness) broke during a solve.
    #[error("hypothesis violated during solve: {0}")]
    Hypothesis(String),

    /// An inline per-iteration inequality check failed while assert mode was on.
    #[error("inline diagnostic failed: {0}")]
    InlineDiagnostic(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A trace was handed to a checker for a different solver family.
    #[error("trace mismatch: {0}")]
    TraceMismatch(String),

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
