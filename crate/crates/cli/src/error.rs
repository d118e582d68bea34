use std::fmt;
use std::process::ExitCode;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an inconsistent configuration (exit 2).
    Usage(String),
    /// Parameters admit no valid code (exit 3).
    Infeasible(String),
    /// Malformed input, unreadable files, or conflicting outputs (exit 4).
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Infeasible(_) => ExitCode::from(3),
            CliError::Data(_) => ExitCode::from(4),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

impl From<pcpolar::Error> for CliError {
    fn from(e: pcpolar::Error) -> Self {
        use pcpolar::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidConfig(_) | E::NotPowerOfTwo(_) | E::WidthOutOfRange { .. } => {
                CliError::Usage(msg)
            }
            E::InvalidSpec(_) | E::Infeasible(_) | E::InvalidAllocation(_) => {
                CliError::Infeasible(msg)
            }
            E::LengthMismatch { .. }
            | E::EnumerationTooLarge { .. }
            | E::BracketNotFound(_)
            | E::Io(_) => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
