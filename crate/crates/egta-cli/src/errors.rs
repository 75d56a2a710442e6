use std::fmt;

/// CLI failure split by exit code: 1 for usage problems, 2 for numerical
/// failures inside a run.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<egta::Error> for CliError {
    fn from(err: egta::Error) -> Self {
        use egta::Error::*;
        match err {
            LpFailure(_) | GridTooLarge { .. } | PsroIteration { .. }
            | InvalidDistribution(_) => CliError::Numerical(err.to_string()),
            _ => CliError::Usage(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Usage(format!("JSON: {err}"))
    }
}

impl From<toml::de::Error> for CliError {
    fn from(err: toml::de::Error) -> Self {
        CliError::Usage(format!("config: {err}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn numerical(msg: impl Into<String>) -> CliError {
    CliError::Numerical(msg.into())
}
