use thiserror::Error;

use crate::kernel::EvalReal;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The argument sits on (or within tolerance of) a pole `x = -n*k`.
    #[error("pole at index {index}")]
    Pole { index: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("index {s} out of range for {len} values")]
    Index { s: usize, len: usize },

    /// Quadrature ran out of refinements; the best estimate is kept.
    #[error(
        "no convergence after {refinements} refinements (estimate {}, error {})",
        partial.value,
        partial.abs_err
    )]
    NoConvergence { partial: EvalReal, refinements: u32 },

    #[error("divergent input: {0}")]
    Divergent(String),

    #[error("series not converged after {terms} terms (partial sum {})", partial.value)]
    MaxTermsExceeded { partial: EvalReal, terms: usize },

    #[error("lower parameter {index} hits a pole at term {term}")]
    LowerPole { index: usize, term: usize },

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable category, used by the CLI and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pole { .. } => "pole",
            Error::Domain(_) => "domain",
            Error::InvalidParams(_) => "invalid_params",
            Error::Index { .. } => "index",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Divergent(_) => "divergent",
            Error::MaxTermsExceeded { .. } => "max_terms_exceeded",
            Error::LowerPole { .. } => "lower_pole",
            Error::UnsupportedShape(_) => "unsupported_shape",
        }
    }
}
