//! Output formats, the reproduction harness and helpers behind the
//! `bellforge` binary.

pub mod format;
pub mod parallel;
pub mod repro;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] bellforge_core::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}
