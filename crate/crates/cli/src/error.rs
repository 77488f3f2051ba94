use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] choi_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    Precondition,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Precondition => 3,
            ErrorKind::Internal => 4,
        }
    }
}

impl CliError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        use choi_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => ErrorKind::Config,
            CliError::Core(e) => match e {
                E::InvalidPauli { .. }
                | E::QubitMismatch { .. }
                | E::InvalidArgument(_)
                | E::InvalidModel(_)
                | E::Format(_)
                | E::Json(_)
                | E::Io(_) => ErrorKind::Config,
                E::DenseLimit { .. }
                | E::Precondition(_)
                | E::NonPositiveNormalization { .. }
                | E::AttemptCapExceeded { .. } => ErrorKind::Precondition,
                E::NotSymplectic(_) | E::Invariant(_) => ErrorKind::Internal,
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind().exit_code()
    }

    /// Machine-readable form printed on failure.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}
