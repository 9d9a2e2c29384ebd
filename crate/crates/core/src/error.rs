use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A custom spectrum violates e[0] = 0, e[n] > 0.
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    /// Index past the end of a finite custom spectrum.
    #[error("level {index} is outside the spectrum (length {len})")]
    Domain { index: usize, len: usize },

    /// The family has no closed form at real occupation.
    #[error("{family} has no real-argument extension of the modulation profile")]
    UnsupportedExtension { family: &'static str },

    #[error("non-positive modulation Omega = {omega}{}", at_p(.p))]
    NonPositiveOmega { omega: f64, p: Option<usize> },

    #[error("zero modulation Omega{}", at_p(.p))]
    ZeroOmega { p: Option<usize> },

    /// Reported, not raised, by the Poisson support builder; available to
    /// callers who want to treat a binding cap as fatal.
    #[error("truncation cap {cap} reached with residual Poisson mass {residual:e}")]
    TruncationCapHit { cap: usize, residual: f64 },

    #[error("index {index} exceeds the stabilised range (max {max})")]
    OutOfRange { index: usize, max: usize },
}

fn at_p(p: &Option<usize>) -> String {
    match p {
        Some(p) => format!(" at p = {p}"),
        None => String::new(),
    }
}

impl Error {
    /// Short machine-readable tag, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::InvalidSpectrum(_) => "invalid_spectrum",
            Error::Domain { .. } => "domain",
            Error::UnsupportedExtension { .. } => "unsupported_extension",
            Error::NonPositiveOmega { .. } => "non_positive_omega",
            Error::ZeroOmega { .. } => "zero_omega",
            Error::TruncationCapHit { .. } => "truncation_cap_hit",
            Error::OutOfRange { .. } => "out_of_range",
        }
    }

    /// True for the two Omega degeneracies (the caller's policy problem, not
    /// a malformed request).
    pub fn is_omega_degeneracy(&self) -> bool {
        matches!(self, Error::NonPositiveOmega { .. } | Error::ZeroOmega { .. })
    }

    /// Attaches the QSM occupation at which an Omega error occurred.
    pub(crate) fn at(self, p: usize) -> Self {
        match self {
            Error::NonPositiveOmega { omega, .. } => Error::NonPositiveOmega { omega, p: Some(p) },
            Error::ZeroOmega { .. } => Error::ZeroOmega { p: Some(p) },
            other => other,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
