use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite sample at (n={snapshot}, f={subcarrier}, m={antenna})")]
    NonFinite {
        snapshot: usize,
        subcarrier: usize,
        antenna: usize,
    },

    #[error("antenna {antenna} has zero average power, gain in dB is undefined")]
    ZeroPowerAntenna { antenna: usize },

    #[error("snapshot {snapshot} has zero power over the selected antennas")]
    ZeroPowerSnapshot { snapshot: usize },

    #[error("zero power: {0}")]
    ZeroPower(&'static str),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::NonFinite { .. } => "non-finite",
            Error::ZeroPowerAntenna { .. }
            | Error::ZeroPowerSnapshot { .. }
            | Error::ZeroPower(_) => "zero-power",
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
