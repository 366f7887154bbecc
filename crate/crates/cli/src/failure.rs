use std::fmt;

use nlsob::Error;

/// Process exit statuses.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Clone)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            kind: "config",
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            kind: "io",
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind, self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Expr(_) => (EXIT_CONFIG, "config"),
            Error::InvalidGrid(_)
            | Error::InvalidExponent(_)
            | Error::Supercritical { .. }
            | Error::InvalidKernel(_)
            | Error::NotInX0 { .. }
            | Error::Precondition(_)
            | Error::GeometryNotFound(_) => (EXIT_VALIDATION, "validation"),
            Error::LengthMismatch { .. }
            | Error::GridMismatch
            | Error::NonFinite(_)
            | Error::BisectionFailed { .. }
            | Error::LineSearchFailed { .. }
            | Error::IterationCap { .. }
            | Error::Suspect(_) => (EXIT_NUMERICAL, "numerical"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}
