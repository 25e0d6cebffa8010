use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    /// Schema errors and dangling references, located by JSON pointer.
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    /// Errors from the library, with the step that raised them.
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: gcstar::Error,
    },
}

impl CliError {
    pub fn schema(pointer: &str, message: impl Into<String>) -> Self {
        let pointer = if pointer.is_empty() { "/".to_string() } else { pointer.to_string() };
        CliError::Schema { pointer, message: message.into() }
    }

    pub fn pointer(&self) -> Option<&str> {
        match self {
            CliError::Schema { pointer, .. } => Some(pointer),
            _ => None,
        }
    }

    /// 2 for usage and incompatible inputs, 3 for unreadable or invalid input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core { source: gcstar::Error::NonAbelian(_), .. } => 2,
            _ => 3,
        }
    }

    pub fn as_exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for gcstar::Result<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core { context: what.into(), source })
    }
}
