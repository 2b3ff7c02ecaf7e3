use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Each variant maps to a stable, greppable code via [`Error::code`] so
/// front-ends can prefix their diagnostics with it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value lies outside the domain an operation accepts.
    #[error("{0}")]
    Domain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Power trace that violates ordering or sign rules. `index` is the
    /// zero-based sample position.
    #[error("malformed trace at sample {index}: {reason}")]
    MalformedTrace { index: usize, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate name {name:?}: entry {first:?} collides with entry {second:?}")]
    DuplicateName {
        name: String,
        first: String,
        second: String,
    },

    #[error("shape error at layer {layer}: {message}")]
    Shape { layer: usize, message: String },

    #[error("unsupported layer {kind:?}: {reason}")]
    UnsupportedLayer { kind: String, reason: String },

    #[error("dimension mismatch: expected {expected} objectives, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "E_DOMAIN",
            Error::InsufficientData(_) => "E_INSUFFICIENT_DATA",
            Error::MalformedTrace { .. } => "E_MALFORMED_TRACE",
            Error::Parse { .. } => "E_PARSE",
            Error::DuplicateName { .. } => "E_DUPLICATE_NAME",
            Error::Shape { .. } => "E_SHAPE",
            Error::UnsupportedLayer { .. } => "E_UNSUPPORTED_LAYER",
            Error::Dimension { .. } => "E_DIMENSION",
            Error::Input(_) => "E_INPUT",
        }
    }
}
