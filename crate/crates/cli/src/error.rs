use std::path::PathBuf;

use thiserror::Error;

/// Exit codes of the `magnoncat` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const DYNAMICS: i32 = 3;
    pub const INPUT_FILE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Model(#[from] magnoncat::Error),
    #[error("{path}: {reason}")]
    InputFile { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use magnoncat::Error as E;
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::InputFile { .. } => exit::INPUT_FILE,
            CliError::Io { .. } => exit::IO,
            CliError::Model(e) => match e {
                E::InvariantViolation { .. } | E::NullBranch { .. } | E::Eigensolver => exit::DYNAMICS,
                _ => exit::CONFIG,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
