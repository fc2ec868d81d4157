//! Crate-wide error type.

use crate::geometry::PointClass;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("element index {index} out of range (mesh has {len} elements)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point ({x}, {y}) is {class:?}; interior point required")]
    NotInterior { x: f64, y: f64, class: PointClass },

    #[error("invalid grid: {0}")]
    GridConfig(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(
        "alignment error: element {index} midpoint off by {distance:.3e} m (tolerance {tol:.3e} m)"
    )]
    Alignment {
        index: usize,
        distance: f64,
        tol: f64,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unsupported format version: found v{found}, this build reads v{supported}")]
    Version { found: u32, supported: u32 },

    #[error("singular system (1-norm condition estimate {condition_estimate:.3e})")]
    Singular { condition_estimate: f64 },

    #[error("quadrature did not converge: achieved error estimate {achieved:.3e}")]
    QuadratureConvergence { achieved: f64 },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code contract: 0 success, 2 usage/config, 3 input data,
    /// 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidMesh(_)
            | Error::Geometry(_)
            | Error::GridConfig(_)
            | Error::Precondition(_)
            | Error::Scenario(_)
            | Error::Config(_) => 2,
            Error::Format(_)
            | Error::Alignment { .. }
            | Error::Data(_)
            | Error::Parse { .. }
            | Error::Version { .. }
            | Error::Io(_)
            | Error::IndexOutOfRange { .. }
            | Error::NotInterior { .. } => 3,
            Error::NonFinite(_) | Error::Singular { .. } | Error::QuadratureConvergence { .. } => 4,
        }
    }
}
