use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite value in {context} at index {index}")]
    NonFinite { context: String, index: usize },

    #[error("non-finite state at step {step} (t = {time})")]
    NonFiniteStep { step: usize, time: f64 },

    #[error("blow-up at step {step}: max |u| = {max_abs} exceeds {limit}")]
    BlowUp { step: usize, max_abs: f64, limit: f64 },

    #[error("resolution lost: top-third spectral fraction {fraction:e} exceeds {limit:e}")]
    Resolution { fraction: f64, limit: f64 },

    #[error("vacuum proximity: min |psi| = {min_abs} at x = {location} (floor {floor})")]
    Vacuum {
        min_abs: f64,
        location: f64,
        floor: f64,
    },

    #[error("window [{lo}, {hi}] leaves the box [{box_lo}, {box_hi}]; largest admissible fast time {max_time}")]
    WindowEscape {
        lo: f64,
        hi: f64,
        box_lo: f64,
        box_hi: f64,
        max_time: f64,
    },

    #[error("denominator underflow: 1 - eps^2 N / 6 = {value} at index {index}")]
    Denominator { value: f64, index: usize },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("run {label}: {source}")]
    Run {
        label: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidGrid(_)
            | Error::Precondition(_)
            | Error::Config(_)
            | Error::WindowEscape { .. } => ErrorKind::Validation,
            Error::NonFinite { .. }
            | Error::NonFiniteStep { .. }
            | Error::BlowUp { .. }
            | Error::Resolution { .. }
            | Error::Vacuum { .. }
            | Error::Denominator { .. } => ErrorKind::Numerical,
            Error::Format { .. } | Error::Io { .. } => ErrorKind::Io,
            Error::Run { source, .. } => source.kind(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn labelled(self, label: impl Into<String>) -> Self {
        Error::Run {
            label: label.into(),
            source: Box::new(self),
        }
    }
}
