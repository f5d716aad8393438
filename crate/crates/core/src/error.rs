use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {component}: expected {expected}, found {found}")]
    DimensionMismatch {
        component: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} is not available for this term")]
    Unavailable { what: &'static str },

    #[error("Lyapunov value {value:e} at trace row {row} is below {floor:e}; use a shorter window")]
    LyapunovUnderflow { row: usize, value: f64, floor: f64 },

    #[error("trace has no reference columns")]
    MissingReference,

    #[error("trace io: {0}")]
    TraceIo(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Scales passed to a proximal map must be positive and finite.
pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

pub(crate) fn check_len(component: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            component,
            expected,
            found,
        })
    }
}
