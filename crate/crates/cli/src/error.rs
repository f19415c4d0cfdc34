use areal_core::Error;

/// Failures of a CLI run, split by exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    /// Unreadable or invalid scenario, bad flags, unwritable outputs.
    #[error("input error: {0}")]
    Input(String),
    /// A computation failed on valid input.
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    /// Wraps a core error. Shape and parameter errors point at the scenario;
    /// everything else happened while computing.
    pub fn core(context: impl std::fmt::Display, e: Error) -> Self {
        match e {
            Error::InvalidDegree { .. }
            | Error::InvalidIndex { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::UnsupportedDegree(_) => CliError::Input(format!("{context}: {e}")),
            _ => CliError::Numeric(format!("{context}: {e}")),
        }
    }
}
