use thiserror::Error;

/// Errors raised by the algebra layer.
///
/// The variants are grouped by how a caller is expected to react: parse and
/// precondition errors mean the input is bad, budget errors mean the
/// computation was cut off, and theorem-check errors mean an identity that
/// must hold on valid input did not.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("groebner budget exceeded: {0}")]
    Budget(String),

    #[error("theorem check `{check}` failed: {detail}")]
    TheoremCheck { check: String, detail: String },

    #[error("center equals ambient; blowup empty")]
    EmptyBlowup,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn theorem(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::TheoremCheck {
            check: check.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
