use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("config line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
    #[error("task {task}: no step has a defined target")]
    NoTargets { task: String },
    #[error("{path}: malformed file ({reason})")]
    Format { path: PathBuf, reason: String },
    #[error(transparent)]
    Core(#[from] nanomag_core::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
