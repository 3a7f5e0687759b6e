//! Crate-wide error type.
//!
//! One enum covers every failure the library can produce; the CLI maps it to
//! process exit codes (1 for anything the user wrote wrong — arguments, problem
//! files, expressions, I/O — and 2 for numerical failure inside the solver).

use std::fmt;

#[derive(Debug)]
pub enum Error {
    /// Requested basis/matrix degree exceeds the supported bound (16).
    DegreeAboveSupportedBound { requested: usize },
    /// A precondition on an argument was violated (quadrature order range, …).
    InvalidArgument(String),
    /// Expression syntax error at a 0-based byte offset of the source.
    Parse { offset: usize, message: String },
    /// Expression evaluation left the function's domain (log of a non-positive
    /// value, division by zero, non-integer power of a negative base, …).
    Domain(String),
    /// A problem file failed to parse or validate; `line` is 1-based.
    ProblemFile { line: usize, message: String },
    /// The assembled problem violates a solver invariant (order 0, n < order, …).
    Validation(String),
    /// The spectral system is numerically singular.
    Singular(String),
    Io(std::io::Error),
}

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Singular(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Error {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Error {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegreeAboveSupportedBound { requested } => {
                write!(f, "degree above supported bound: {requested} > 16")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Parse { offset, message } => {
                write!(f, "syntax error at offset {offset}: {message}")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::ProblemFile { line, message } => {
                write!(f, "problem file, line {line}: {message}")
            }
            Error::Validation(msg) => write!(f, "invalid problem: {msg}"),
            Error::Singular(msg) => write!(f, "singular system: {msg}"),
            Error::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}
