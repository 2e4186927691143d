//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or configuration value.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Text input that could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Structurally inconsistent data (dimension mismatch etc.).
    #[error("validation error: {0}")]
    Validation(String),

    /// LP solver failure; `digest` identifies the offending problem.
    #[error("lp solver error (problem digest {digest:#018x}): {msg}")]
    Solver { digest: u64, msg: String },

    /// Operation refused for this input (e.g. unbounded enumeration box).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A decision-process run aborted mid-way; the partial trace is attached.
    #[error("run aborted at node {node}: {msg}")]
    RunAborted {
        node: usize,
        msg: String,
        trace: Box<crate::engine::RunTrace>,
    },

    /// A slice scan found a piece that is not constant after refinement.
    #[error(
        "structural violation at t={t}: piece value {expected} but sampled {found} ({detail})"
    )]
    StructuralViolation {
        t: f64,
        expected: f64,
        found: f64,
        detail: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
