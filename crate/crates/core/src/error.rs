use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Io(#[from] io::Error),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("resource guard: {0}")]
    Resource(String),

    #[error("no closed form for radius {0} (only 0, 1 and 2 are supported)")]
    UnsupportedRadius(u32),

    #[error("closed form is not an integer: {numerator}/{denominator}")]
    NonIntegral { numerator: u128, denominator: u128 },

    #[error("arithmetic overflow evaluating {0}")]
    Overflow(&'static str),

    #[error("insufficient data: {retained} samples at or above x_min, need {required}")]
    InsufficientData { retained: usize, required: usize },

    #[error("degenerate fit: all samples are equal")]
    DegenerateFit,

    #[error("malformed graph file: {0}")]
    Format(String),
}

/// Coarse category used to pick a process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Resource,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Argument(_) | Error::UnsupportedRadius(_) => ErrorClass::Usage,
            Error::Resource(_) => ErrorClass::Resource,
            _ => ErrorClass::Data,
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
