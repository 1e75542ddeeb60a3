//! CLI error channel mapped onto process exit codes.

#[derive(Debug)]
pub enum CliError {
    /// Invalid or missing parameters (exit 2).
    Args(String),
    /// Filesystem or serialization failure (exit 3).
    Io(String),
    /// A command produced no data to act on (exit 4).
    Empty(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(_) => 2,
            CliError::Io(_) => 3,
            CliError::Empty(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Args(m) | CliError::Io(m) | CliError::Empty(m) => m,
        }
    }
}

impl From<normgame::Error> for CliError {
    fn from(err: normgame::Error) -> Self {
        CliError::Args(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
