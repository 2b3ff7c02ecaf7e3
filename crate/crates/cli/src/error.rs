use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] greeneval::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: unknown hardware {name:?} (nearest catalog entries: {})", nearest.join(", "))]
    UnresolvedHardware {
        line: usize,
        name: String,
        nearest: Vec<String>,
    },

    #[error("line {line}: duplicate label {label:?} (first seen on line {first})")]
    DuplicateLabel { line: usize, label: String, first: usize },

    #[error("line {line} ({label}): {}", violations.join("; "))]
    InvalidRecord {
        line: usize,
        label: String,
        violations: Vec<String>,
    },

    #[error("unknown objective {name:?} (available: {})", available.join(", "))]
    UnknownObjective { name: String, available: Vec<String> },

    #[error("{} record(s) lack a selected objective: {}; pass --exclude-incomplete to skip them", missing.len(), missing.join(", "))]
    Incomplete { missing: Vec<String> },

    #[error("no records with all of the selected objectives ({excluded} excluded)")]
    NoRecords { excluded: usize },

    #[error("refusing to overwrite {} (use --force)", .0.display())]
    OutputExists(PathBuf),

    #[error("refusing to overwrite input file {}", .0.display())]
    WouldClobberInput(PathBuf),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "E_IO",
            CliError::UnresolvedHardware { .. } => "E_UNRESOLVED_HARDWARE",
            CliError::DuplicateLabel { .. } => "E_DUPLICATE_LABEL",
            CliError::InvalidRecord { .. } => "E_INVALID_RECORD",
            CliError::UnknownObjective { .. } => "E_UNKNOWN_OBJECTIVE",
            CliError::Incomplete { .. } => "E_INCOMPLETE",
            CliError::NoRecords { .. } => "E_NO_RECORDS",
            CliError::OutputExists(_) => "E_OUTPUT_EXISTS",
            CliError::WouldClobberInput(_) => "E_OUTPUT_EXISTS",
            CliError::Usage(_) => "E_USAGE",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// `error[CODE]: message` on one line.
    pub fn render(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error[{}]: {msg}", self.code())
    }
}
