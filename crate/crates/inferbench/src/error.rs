//! Error taxonomy for the harness. The split mirrors the CLI's exit
//! codes: usage/format problems exit 2, run and rule failures exit 1.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    LogFormat { path: PathBuf, line: usize, message: String },
    #[error("dataset error: {0}")]
    Dataset(String),
    #[error("backend error: {0}")]
    Backend(String),
    #[error("run invalid: {0}")]
    RunInvalid(String),
    #[error("quality gate failed: {0}")]
    GateFailed(String),
    #[error("audit failed: {0}")]
    AuditFailed(String),
    #[error("reproduction failed: {0}")]
    ReproductionFailed(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// Exit code contract: 0 pass, 1 rule/gate/run failure, 2 usage/format.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io { .. } | HarnessError::LogFormat { .. } | HarnessError::Dataset(_) => 2,
            HarnessError::Backend(_)
            | HarnessError::RunInvalid(_)
            | HarnessError::GateFailed(_)
            | HarnessError::AuditFailed(_)
            | HarnessError::ReproductionFailed(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
