//! Batch front-end: reads a TOML job, runs the requested analyses and
//! writes CSV/JSON artifacts together with a manifest of content digests.

use std::fmt;

pub mod config;
pub mod jobs;
pub mod output;

pub use config::{load_config, parse_config, parse_config_in, Analysis, JobConfig};
pub use jobs::run_job;
pub use output::{Manifest, ManifestEntry, MANIFEST_FILE, MANIFEST_SCHEMA};

/// Failure of a job, split by the exit code it maps to.
#[derive(Debug)]
pub enum JobError {
    /// The job description is invalid (exit code 2).
    Validation(String),
    /// The job was valid but failed while running (exit code 1).
    Runtime(String),
}

impl JobError {
    pub fn validation(msg: impl Into<String>) -> Self {
        JobError::Validation(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        JobError::Runtime(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Validation(_) => 2,
            JobError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JobError::Validation(m) => write!(f, "validation error: {m}"),
            JobError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for JobError {}

impl From<fewbody::Error> for JobError {
    fn from(e: fewbody::Error) -> Self {
        use fewbody::Error as E;
        match e {
            E::InvalidArgument(_)
            | E::UnsupportedSize { .. }
            | E::Mismatch(_)
            | E::EmptyBasis { .. }
            | E::InsufficientBasis { .. }
            | E::UnsupportedTrap(_)
            | E::Parse(_) => JobError::Validation(e.to_string()),
            E::Resolution { .. } | E::InsufficientData { .. } | E::Degenerate(_) | E::Io { .. } => {
                JobError::Runtime(e.to_string())
            }
        }
    }
}
