use std::fmt;

/// CLI failure, split by the exit status it maps to.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad arguments or configuration; exit status 2.
    Usage(String),
    /// A computation or output step failed; exit status 1.
    Eval(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn eval(msg: impl Into<String>) -> Self {
        CliError::Eval(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Eval(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Eval(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fdrelay::Error> for CliError {
    fn from(e: fdrelay::Error) -> Self {
        CliError::Eval(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Eval(format!("I/O: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Eval(format!("CSV: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
