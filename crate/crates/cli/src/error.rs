use std::fmt;
use std::process::ExitCode;

/// Failure of a CLI run, grouped by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inadmissible request (exit 2).
    Validation(String),
    /// Error raised by the model library.
    Model(nlspring::Error),
    /// Reading or writing output failed (exit 1).
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "invalid_argument",
            CliError::Model(e) => e.code(),
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io(_) => ExitCode::from(1),
            CliError::Model(e) if e.is_omega_degeneracy() => ExitCode::from(3),
            CliError::Validation(_) | CliError::Model(_) => ExitCode::from(2),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Io(msg) => write!(f, "{}: {msg}", self.code()),
            CliError::Model(nlspring::Error::NonPositiveOmega { omega, p }) => {
                write!(f, "non_positive_omega: p={} omega={omega}", p_field(p))?;
                write!(f, " (use --omega-policy absolute to continue with |Omega|)")
            }
            CliError::Model(nlspring::Error::ZeroOmega { p }) => {
                write!(f, "zero_omega: p={} (the oscillator has no bound mode here)", p_field(p))
            }
            CliError::Model(e) => write!(f, "{}: {e}", e.code()),
        }
    }
}

fn p_field(p: &Option<usize>) -> String {
    p.map_or_else(|| "classical".to_string(), |p| p.to_string())
}

impl From<nlspring::Error> for CliError {
    fn from(e: nlspring::Error) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
