use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Argument outside the real domain of a transform or moment formula.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance: {0}")]
    Quadrature(String),

    #[error("series evaluation did not converge: {0}")]
    Convergence(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("found {found} constant periods, at least {required} required")]
    NoConstantPeriods { found: usize, required: usize },

    #[error("exponent overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("time grid error at row {row}: {message}")]
    Grid { row: usize, message: String },

    #[error("ragged input at row {row}: expected {expected} fields, found {found}")]
    Shape {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::Domain(_)
            | Error::Parse(_)
            | Error::Grid { .. }
            | Error::Shape { .. }
            | Error::NoConstantPeriods { .. } => 2,
            Error::Quadrature(_)
            | Error::Convergence(_)
            | Error::Fit(_)
            | Error::Optimization(_)
            | Error::Overflow(_) => 3,
            Error::Io(_) => 4,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        if err.is_io_error() {
            match err.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                other => Error::Parse(format!("{other:?}")),
            }
        } else {
            Error::Parse(err.to_string())
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        if err.is_io() {
            Error::Io(err.into())
        } else {
            Error::Parse(err.to_string())
        }
    }
}
