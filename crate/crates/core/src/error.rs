use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The weight function was evaluated at a point where it diverges.
    #[error("weight function is singular at |z| + eps = 0 (use eps > 0)")]
    Singular,

    #[error("non-finite iterate at iteration {iteration}: {what}")]
    NonFinite { iteration: usize, what: &'static str },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::Dimension {
                context,
                expected,
                found,
            })
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
