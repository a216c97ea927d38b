use thiserror::Error;

/// Errors raised by the GLS calculus and the verification harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("empty effective support")]
    EmptySupport,

    #[error("natural function trivial: no finite moment with p > 1")]
    TrivialNatural,

    #[error("moment table not monotone: |.|_{p_lo} = {lo} > |.|_{p_hi} = {hi}")]
    MomentMonotonicity { p_lo: f64, lo: f64, p_hi: f64, hi: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("enumeration too large: {0}")]
    EnumerationTooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable short identifier, used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Unsupported(_) => "unsupported",
            Error::EmptySupport => "empty_support",
            Error::TrivialNatural => "trivial_natural",
            Error::MomentMonotonicity { .. } => "moment_monotonicity",
            Error::Invalid(_) => "invalid",
            Error::EnumerationTooLarge(_) => "enumeration_too_large",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
