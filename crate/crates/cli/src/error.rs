use thiserror::Error;

/// CLI failure, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error("{0}")]
    Experiment(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Io(_) => 3,
            CliError::Experiment(_) => 4,
        }
    }

    /// Core errors raised while validating user input or reading data.
    pub fn from_input(e: acovdiff::Error) -> Self {
        use acovdiff::Error as E;
        match e {
            E::SeriesTooShort { .. } | E::Config(_) => CliError::Data(e.to_string()),
            E::TooManyFailures { .. } => CliError::Experiment(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }

    /// Core errors raised while an experiment runs.
    pub fn from_run(e: acovdiff::Error) -> Self {
        CliError::Experiment(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(format!("csv error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
