use std::path::PathBuf;

/// Harness-level errors, mapped onto the CLI exit codes.
#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("run produced zero successful cells")]
    ZeroCells,
}

impl BenchError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| BenchError::Io { path, source }
    }

    /// CLI exit code: 0 success, 1 config error, 2 data error, 3 zero cells.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 1,
            BenchError::Data(_) | BenchError::Io { .. } => 2,
            BenchError::ZeroCells => 3,
        }
    }
}

impl From<tser_core::Error> for BenchError {
    fn from(err: tser_core::Error) -> Self {
        BenchError::Data(err.to_string())
    }
}
