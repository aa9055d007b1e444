use std::path::PathBuf;

use thiserror::Error;

/// Failures of the simulation driver.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot parse configuration {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("integration failed at t = {t}: {source}")]
    Runtime {
        t: f64,
        #[source]
        source: so3flock::Error,
    },

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

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("verification failed: {0}")]
    Verify(String),
}

impl SimError {
    /// Process exit status for this error: 2 for configuration problems, 3 for
    /// failures while integrating or writing results, 4 for failed checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::ConfigParse { .. } => 2,
            SimError::Runtime { .. } | SimError::Io { .. } | SimError::Csv { .. } | SimError::Json { .. } => 3,
            SimError::Verify(_) => 4,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
