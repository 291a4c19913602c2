use std::path::{Path, PathBuf};

use lotdraw::engine::EngineError;
use lotdraw::experiments::ExperimentError;
use lotdraw::model::ModelError;
use lotdraw::oracle::OracleError;
use lotdraw::procedures::ProcedureError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Validation(_) => 3,
            CliError::Usage(_) => 4,
            CliError::Io { .. } => 5,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub fn parse(path: &Path, err: &serde_json::Error) -> Self {
        CliError::Parse {
            path: path.to_owned(),
            line: err.line(),
            column: err.column(),
            message: message_without_location(err),
        }
    }
}

/// serde_json appends " at line L column C"; the location is reported separately.
fn message_without_location(err: &serde_json::Error) -> String {
    let text = err.to_string();
    match text.rsplit_once(" at line ") {
        Some((message, _)) => message.to_owned(),
        None => text,
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ProcedureError> for CliError {
    fn from(e: ProcedureError) -> Self {
        match e {
            ProcedureError::MissingPartition(_) | ProcedureError::UnknownProcedure(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::UnknownCase(_) | ExperimentError::Scale(_) | ExperimentError::NoTrials => {
                CliError::Usage(e.to_string())
            }
            ExperimentError::Procedure(p) => p.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}
