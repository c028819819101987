use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] privgraph::Error),
    #[error("config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// 0 success, 1 configuration, 2 input/output, 3 numeric failure.
pub fn exit_code(err: &CliError) -> i32 {
    use privgraph::Error as E;
    match err {
        CliError::Json(_) => 1,
        CliError::Io { .. } => 2,
        CliError::Core(e) => match e {
            E::Config(_) | E::Precondition(_) => 1,
            E::Io(_) | E::Input(_) => 2,
            E::Diverged { .. } | E::NotFinite(_) | E::Shape { .. } => 3,
        },
    }
}

pub fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
