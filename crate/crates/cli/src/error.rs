use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, unreadable or malformed input.
    #[error("{0}")]
    Input(String),
    /// A computed result broke an internal guarantee.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<simba_core::Error> for CliError {
    fn from(e: simba_core::Error) -> Self {
        match e {
            simba_core::Error::Invariant(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Shorthand for an input error built from `format!` arguments.
macro_rules! input_err {
    ($($arg:tt)*) => { $crate::error::CliError::Input(format!($($arg)*)) };
}
pub(crate) use input_err;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(simba_core::Error::Config("x".into())).exit_code(), 1);
        assert_eq!(CliError::from(simba_core::Error::Invariant("x".into())).exit_code(), 2);
    }
}
