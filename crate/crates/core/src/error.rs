use std::path::PathBuf;

use crate::capacity::CapacityResult;
use crate::grid::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point {0:?} lies outside the closed domain")]
    OutsideDomain(Point),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("grid construction failed: {0}")]
    Construction(String),

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("function is not admissible: {0}")]
    Admissibility(String),

    #[error("expression error: {0}")]
    Expression(String),

    #[error(
        "capacity solver did not converge after {} iterations (residual {:.3e})",
        .0.iterations,
        .0.residual
    )]
    NotConverged(Box<CapacityResult>),

    #[error(
        "certificate inapplicable at index {index}: norm gap {gap:.6e} exceeds threshold {threshold:.6e}"
    )]
    CertificateInapplicable {
        index: usize,
        gap: f64,
        threshold: f64,
    },

    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}
