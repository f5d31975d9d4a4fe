use std::fmt;

/// A command failure, carrying its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Invalid or missing configuration; `field` names the offending key.
    Config { field: String, message: String },
    /// Singularity, overflow or another failure while integrating.
    Numerical(String),
    /// `--check` found values outside their bands.
    Mismatch(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Mismatch(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, message } => write!(f, "invalid `{field}`: {message}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Mismatch(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Attaches a config field to core errors. Input-shaped errors become
/// configuration errors, everything else is a numerical failure.
pub trait AtField<T> {
    fn at(self, field: &str) -> CliResult<T>;
}

impl<T> AtField<T> for fgsymp::Result<T> {
    fn at(self, field: &str) -> CliResult<T> {
        use fgsymp::Error as E;
        self.map_err(|e| match e {
            E::Parameter(_) | E::Domain(_) | E::InfeasibleEnergy { .. } | E::GridMismatch(_) => {
                CliError::config(field, e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        })
    }
}
