use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix dimension {dim} exceeds the supported maximum {max}")]
    Size { dim: usize, max: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("POVM element {0} has rank 2, dilation needs elements of rank at most 1")]
    NotExtremal(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("strategy space of size {size} exceeds the enumeration cap {cap}")]
    EnumerationCap { size: u128, cap: u128 },
    #[error("linearly dependent constraint rows {0:?}")]
    DependentConstraints(Vec<usize>),
    #[error("invalid SDP problem: {0}")]
    InvalidProblem(String),
    #[error("SDP solver failed: {0}")]
    Solver(String),
    #[error("no sign change in bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("invalid measurement class: {0}")]
    InvalidClass(String),
}

pub type Result<T> = core::result::Result<T, Error>;
