use std::fmt;

/// Failures mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration, parameters or input files (exit 2).
    Config(String),
    /// A numerical method failed (exit 3).
    Numerical(String),
    /// Some verified identity failed (exit 1).
    Failed(String),
    /// The reader closed the output pipe (exit 0, nothing reported).
    Closed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Closed => 0,
            CliError::Failed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Failed(m) => write!(f, "verification failed: {m}"),
            CliError::Closed => write!(f, "output closed"),
        }
    }
}

impl From<fracsub::Error> for CliError {
    fn from(e: fracsub::Error) -> Self {
        match e {
            fracsub::Error::Domain(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

pub fn io_error(what: &str, e: impl Into<std::io::Error>) -> CliError {
    let e: std::io::Error = e.into();
    let csv_pipe = e.get_ref().and_then(|inner| inner.downcast_ref::<csv::Error>()).is_some_and(
        |c| matches!(c.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe),
    );
    if e.kind() == std::io::ErrorKind::BrokenPipe || csv_pipe {
        return CliError::Closed;
    }
    CliError::Config(format!("{what}: {e}"))
}
