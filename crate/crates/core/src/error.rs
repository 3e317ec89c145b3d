use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("reflection coefficient is singular at omega = {omega} (|denominator| = {magnitude:e})")]
    Singular { omega: f64, magnitude: f64 },

    #[error("frequency grids do not match ({left} vs {right} samples)")]
    GridMismatch { left: usize, right: usize },

    #[error(
        "quadrature refinement check failed for {quantity}: coarse grid gives {coarse:e}, \
         fine grid gives {fine:e} (relative difference {relative:e})"
    )]
    Refinement {
        quantity: &'static str,
        coarse: f64,
        fine: f64,
        relative: f64,
    },

    #[error("no-click branch: herald normalization K_s = {0:e} is zero")]
    NoClick(f64),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("physics invariant violated: {0}")]
    Invariant(String),

    #[error("trajectory has not decayed at the window edge: max amplitude {amplitude:e} at t = {t}")]
    Truncation { t: f64, amplitude: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerical,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) | Error::Domain(_) | Error::Config(_) => ErrorKind::Config,
            Error::GridMismatch { .. } => ErrorKind::Config,
            Error::Singular { .. }
            | Error::Refinement { .. }
            | Error::NoClick(_)
            | Error::Integration { .. }
            | Error::Truncation { .. }
            | Error::Invariant(_) => ErrorKind::Numerical,
            Error::Io { .. } => ErrorKind::Io,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
