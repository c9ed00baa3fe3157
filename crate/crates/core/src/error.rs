use thiserror::Error;

/// Errors raised anywhere in the laboratory.
///
/// Variants are grouped by how a caller is expected to react: configuration
/// and usage errors are the caller's fault, resolution errors mean the grid
/// is too coarse for the requested scale, numeric errors are internal.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("unsupported path kind: {0}")]
    UnsupportedKind(String),
    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),
    #[error("fit error: {reason} (levels {levels:?}, counts {counts:?})")]
    Fit {
        reason: String,
        levels: Vec<u32>,
        counts: Vec<f64>,
    },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parse(_) => 2,
            Error::Config(_)
            | Error::Domain(_)
            | Error::Resolution(_)
            | Error::Range(_)
            | Error::UnsupportedKind(_)
            | Error::DegenerateMeasure(_)
            | Error::Io(_) => 3,
            Error::Fit { .. } | Error::Numeric(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
