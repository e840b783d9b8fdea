use serde_json::json;

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Validation = 2,
    Solver = 3,
    Undecided = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] nlfront_core::Error),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Model(e) => e.kind(),
            CliError::Io(_) => "io",
        }
    }

    pub fn exit(&self) -> Exit {
        use nlfront_core::Error as E;
        match self {
            CliError::Config(_) => Exit::Validation,
            CliError::Model(e) if e.is_validation() => Exit::Validation,
            CliError::Model(E::NoThreshold(_) | E::NoPositiveEquilibrium { .. }) => {
                Exit::Validation
            }
            CliError::Model(_) | CliError::Io(_) => Exit::Solver,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.exit() as i32
    }

    /// Machine-readable diagnostic.
    pub fn diagnostic(&self) -> serde_json::Value {
        json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
