use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A discretization or quadrature is too coarse. `mode` names the first
    /// single-particle mode that failed a check, when one is known.
    #[error("insufficient resolution{}: {reason}", .mode.map(|m| format!(" at mode {m}")).unwrap_or_default())]
    Resolution { mode: Option<usize>, reason: String },

    #[error("unsupported size: {what} = {value} (supported maximum {max})")]
    UnsupportedSize {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("empty basis: E_max = {e_max} is below the minimum total energy {min_energy}")]
    EmptyBasis { e_max: f64, min_energy: f64 },

    #[error("insufficient basis: {available} single-particle modes available, {required} required")]
    InsufficientBasis { available: usize, required: usize },

    #[error("insufficient data: {got} levels given, at least {required} required")]
    InsufficientData { got: usize, required: usize },

    #[error("unsupported trap: {0}")]
    UnsupportedTrap(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error at {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
