use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {what} ({left} vs {right})")]
    DimMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("scale mismatch: N={left} vs N={right}")]
    ScaleMismatch { left: u32, right: u32 },

    #[error("non-finite state at integration step {step}: ({x}, {p})")]
    NonFiniteFlow { step: u64, x: f64, p: f64 },

    #[error("non-finite value {value} of f at eigenvalue {eigenvalue}")]
    NonFiniteFunction { eigenvalue: f64, value: f64 },

    #[error(
        "coherent state underflow: |w|^2/hbar = {mu:.3e} and every retained coefficient \
         underflows with cutoff {cutoff}; increase the cutoff to at least ~{suggested}"
    )]
    CoherentUnderflow {
        mu: f64,
        cutoff: usize,
        suggested: usize,
    },

    #[error("eigendecomposition did not converge (dim {dim}, max |entry| {max_abs:.3e}, iteration cap {cap})")]
    NoConvergence { dim: usize, max_abs: f64, cap: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
