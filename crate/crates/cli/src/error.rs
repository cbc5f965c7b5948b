use std::fmt;

/// Failure of a CLI invocation. Each kind maps to its own exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(Vec<String>),
    Io(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Io(_) => 4,
            CliError::Numerical(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Config(list) => {
                write!(f, "invalid configuration:")?;
                for v in list {
                    write!(f, "\n  - {v}")?;
                }
                Ok(())
            }
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<butterfly::Error> for CliError {
    fn from(e: butterfly::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
