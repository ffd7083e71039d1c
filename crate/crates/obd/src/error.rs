use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] obd_core::Error),
    #[error("{0}")]
    Command(String),
    #[error("expectation failed: {0}")]
    Expectation(String),
    #[error("line {line}: {source}")]
    At { line: usize, source: Box<CliError> },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for problems with the input, 2 for problems with the system.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::At { source, .. } => source.exit_code(),
            CliError::Io { .. } | CliError::Core(obd_core::Error::Format { .. }) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
