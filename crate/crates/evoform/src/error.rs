use std::path::PathBuf;

use thiserror::Error;

/// Everything that can stop a command, mapped onto the exit-code table:
/// 2 missing input, 3 invalid input, 4 numeric failure, 5 classify range.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {reason}")]
    NotFound { path: PathBuf, reason: String },
    #[error("scenario `{name}` not found (not a file, bundled name or entry of the scenario dir)")]
    UnknownScenario { name: String },
    #[error("schema violation at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("numeric failure in {module}: {source}")]
    Numeric {
        module: &'static str,
        #[source]
        source: evoform_core::Error,
    },
    #[error("{0}")]
    ClassifyRange(evoform_core::Error),
    #[error("cannot write {path}: {reason}")]
    Write { path: PathBuf, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NotFound { .. } | CliError::UnknownScenario { .. } => 2,
            CliError::Schema { .. } | CliError::Argument(_) => 3,
            CliError::Numeric { .. } | CliError::Write { .. } => 4,
            CliError::ClassifyRange(_) => 5,
        }
    }

    pub fn schema(pointer: impl Into<String>, message: impl std::fmt::Display) -> Self {
        CliError::Schema {
            pointer: pointer.into(),
            message: message.to_string(),
        }
    }

    pub fn numeric(module: &'static str) -> impl FnOnce(evoform_core::Error) -> CliError {
        move |source| CliError::Numeric { module, source }
    }
}
