use thiserror::Error;

/// Failures of the moment / factorization / identity pipeline.
///
/// A failed identity is never an error: checks report residuals. Errors are
/// structural (bad input, singular leading minors, undefined evaluations).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular leading minor: elimination pivot block at level {level} is singular")]
    SingularLeadingMinor { level: usize },

    #[error("singular diagonal block at index {index}")]
    SingularDiagonalBlock { index: usize },

    #[error("singular truncated moment matrix g^[{size}]")]
    SingularMinor { size: usize },

    #[error("invalid weight family{}: {reason}", entry_suffix(.entry))]
    InvalidFamily {
        entry: Option<(usize, usize)>,
        reason: String,
    },

    #[error("point {x} lies outside the support of weight entry ({a},{b})")]
    OutOfSupport { x: String, a: usize, b: usize },

    #[error("value not representable in the {backend} backend: {what}")]
    Unrepresentable { backend: &'static str, what: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("singular locus: x^{na} = y^{nb} for entry ({a},{b})")]
    SingularLocus { a: usize, b: usize, na: usize, nb: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

fn entry_suffix(entry: &Option<(usize, usize)>) -> String {
    match entry {
        Some((a, b)) => format!(" at entry ({a},{b})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
