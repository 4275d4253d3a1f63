use thiserror::Error;

use crate::types::Violation;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("path '{id}' has {len} values, need at least {min}")]
    PathTooShort { id: String, len: usize, min: usize },

    #[error("window out of range: l={l}, m={m} on a path of length {n}")]
    WindowOutOfRange { l: usize, m: usize, n: usize },

    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("kappa={kappa} out of range for {n} paths (need 2 <= kappa <= n)")]
    KappaOutOfRange { kappa: usize, n: usize },

    #[error("invalid dataset: {}", format_violations(.0))]
    InvalidDataset(Vec<Violation>),

    #[error("invalid parameter {name}={value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("exact label matching supports kappa <= {max}, got {kappa}")]
    KappaTooLargeForExact { kappa: usize, max: usize },

    #[error("size mismatch: {left} labels vs {right} paths")]
    SizeMismatch { left: usize, right: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
