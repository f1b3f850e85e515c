use thiserror::Error;

use crate::group::Mat2;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error("matrix {matrix:?} rejected: {reason}")]
    BadMatrix { matrix: Mat2, reason: String },

    #[error("{what} = {value} exceeds cap {cap}")]
    CapExceeded { what: String, value: u64, cap: u64 },

    #[error("checked arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("element does not belong to {0}")]
    FamilyMismatch(String),

    #[error("generating set is empty after removing the identity")]
    DegenerateGenerators,

    #[error("generating set does not generate the group ({reached} of {order} elements reached)")]
    NotGenerating { reached: u64, order: u64 },

    #[error("incompatible specs: {0}")]
    IncompatibleSpecs(String),

    #[error("infinite group needs a finite radius")]
    InfiniteNeedsRadius,

    #[error("all translation differences vanish (function is constant)")]
    ZeroGradient,

    #[error("{what} did not converge: {detail}")]
    NoConvergence { what: &'static str, detail: String },

    #[error("bad scale: {0}")]
    BadScale(String),

    #[error("embedding vanishes at non-identity element {0}")]
    ZeroNorm(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn cap(what: impl Into<String>, value: u64, cap: u64) -> Self {
        Error::CapExceeded { what: what.into(), value, cap }
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Process exit code used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } | Error::Overflow(_) => 3,
            Error::NoConvergence { .. } | Error::ZeroNorm(_) | Error::ZeroGradient => 2,
            _ => 1,
        }
    }
}
